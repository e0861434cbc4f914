# Copyright (c) 2026, Los autores de Pampero (ver AUTHORS.md)

# This file is part of Pampero.

# Pampero is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.

# Pampero is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.

# You should have received a copy of the GNU General Public License
# along with Pampero.  If not, see <https://www.gnu.org/licenses/>.

from .excepciones import (
    ErrorEval, MissingPrediction, UnknownModelPricing, PricingError, TaskFileError
)
from .tasks import (
    INTENTS, CallMatcher, TaskSpec, read_tasks, write_tasks, task_a_dict, task_desde_dict,
    default_tolerance
)
from .matching import TrajectoryMatch, match_trajectory, call_matches, value_matches
from .metrics import (
    EoError, DetectionScores, eo_error, detection_metrics, success_check, iou
)
from .cost import (
    ModelRates, LocalRates, PricingTable, load_pricing, pricing_table, compute_cost
)
from .report import MetricsReport, aggregate_report, write_report, read_report, render_report
from .gating import GatingSimulation, simulate_gating_policy
