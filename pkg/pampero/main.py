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

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pampero import __about__, recursos
from pampero.agent import AgentConfig, MODES, read_runs, run_task, write_run
from pampero.backends import (
    ErrorBackend, load_backend_config, load_replay_bundle, record_fixture, write_replay_bundle
)
from pampero.backends.excepciones import ConfigError
from pampero.eval import (
    TaskSpec, aggregate_report, compute_cost, load_pricing, read_tasks, render_report,
    write_report, write_tasks
)
from pampero.eval.excepciones import UnknownModelPricing
from pampero.excepciones import ErrorConfiguracion
from pampero.ledger import Ledger
from pampero.sandbox import FaultPlan, World, arm_faults, full_registry
from pampero.taskgen import ErrorTaskgen, build_gold_script, generate_tasks, load_templates
from pampero.workflow import ErrorWorkflow, bundled_workflow, load_workflow_file
from pampero.workflow.excepciones import ErrorDiagnosticos

logger = logging.getLogger('pampero')

EXITO = 0

FALLAS = 1

ERROR_CONFIGURACION = 2

FORMATO_LOG = '%(asctime)s %(levelname)s %(name)s: %(message)s'

NIVELES = {-1: logging.ERROR, 0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


def configurar_logging(verbosidad):
    nivel = NIVELES[max(-1, min(verbosidad, 2))]
    logging.basicConfig(level=nivel, format=FORMATO_LOG, stream=sys.stderr)


def _mundo(args, seed=None, n_images=400, n_regions=6):
    if getattr(args, 'catalog', None):
        return World.load(args.catalog)
    return World.generate(seed, n_images, n_regions)


def _mundos(args, tasks):
    """Mundo de cada tarea según su escenario; se generan una sola vez."""
    if args.catalog:
        mundo = World.load(args.catalog)
        return {task.task_id: mundo for task in tasks}
    cache, mundos = {}, {}
    for task in tasks:
        escenario = task.scenario or {'seed': args.seed}
        clave = (escenario['seed'], escenario.get('n_images', 400),
                 escenario.get('n_regions', 6))
        if clave not in cache:
            logger.info('generando el mundo %s', clave)
            cache[clave] = World.generate(*clave)
        mundos[task.task_id] = cache[clave]
    return mundos


def _workflows(ruta, tasks):
    """Workflow de cada tarea.

    ``ruta`` puede ser un archivo (un único workflow para todas las tareas),
    una carpeta con ``<workflow>.flow`` o ``None`` para usar los incluidos.
    """
    cache, workflows = {}, {}
    for task in tasks:
        nombre = task.workflow or 'eo_single'
        if ruta and os.path.isfile(ruta):
            clave = ruta
        elif ruta:
            clave = os.path.join(ruta, f'{nombre}.flow')
        else:
            clave = recursos.flow(nombre)
        if clave not in cache:
            cache[clave] = load_workflow_file(clave)
        workflows[task.task_id] = cache[clave]
    return workflows


def _config_agente(args):
    return AgentConfig.for_mode(
        args.mode, max_turns=args.max_turns, strict_transitions=args.strict_transitions
    )


def _guiones(cfg, tasks):
    if cfg.kind != 'replay':
        return {}
    if not cfg.script:
        raise ConfigError('replay: falta script en la configuración del backend')
    guiones = load_replay_bundle(cfg.script)
    faltantes = [task.task_id for task in tasks if task.task_id not in guiones]
    if faltantes:
        raise ConfigError(f'{cfg.script}: faltan guiones para {", ".join(faltantes[:5])}')
    return guiones


def _validar_precios(pricing, cfg):
    if cfg.facturacion == 'local':
        if pricing.local is None:
            raise UnknownModelPricing('no hay tarifas para el despliegue local')
    else:
        pricing.rates(cfg.modelo_precios)


def gen_catalog(args):
    mundo = World.generate(args.seed, args.images, args.regions)
    mundo.save(args.out)
    print(f'{len(mundo.catalog)} imágenes y {len(mundo.regions)} regiones en {args.out}')
    return EXITO


def gen_tasks(args):
    mundo = _mundo(args, args.world_seed, args.images, args.regions)
    tasks = generate_tasks(mundo, load_templates(args.templates), args.n, args.seed)
    write_tasks(args.out, tasks)
    print(f'{len(tasks)} tareas en {args.out}')
    if args.scripts:
        workflows = _workflows(args.workflow, tasks)
        plan = arm_faults(FaultPlan(args.fault_rate, args.fault_seed))
        guiones = [
            build_gold_script(task, workflows[task.task_id], mundo, plan,
                              args.premature_terminate)
            for task in tasks
        ]
        write_replay_bundle(args.scripts, guiones)
        print(f'{len(guiones)} guiones en {args.scripts}')
    return EXITO


def run(args):
    tasks = read_tasks(args.tasks)
    if args.task_id:
        tasks = [task for task in tasks if task.task_id == args.task_id]
        if not tasks:
            raise ConfigError(f'{args.tasks}: no existe la tarea {args.task_id!r}')
    task = tasks[0]
    agente = _config_agente(args)
    cfg = load_backend_config(args.backend)
    guiones = _guiones(cfg, [task])
    workflow = _workflows(args.workflow, [task])[task.task_id]
    mundo = _mundos(args, [task])[task.task_id]
    plan = arm_faults(FaultPlan(args.fault_rate, args.fault_seed))
    registro = run_task(
        task, workflow, cfg, mundo, agente, args.out, plan, guiones.get(task.task_id)
    )
    print(f'{registro.task_id}: {registro.status}')
    print(f'respuesta: {registro.final_answer}')
    return EXITO if registro.status == 'completed' else FALLAS


def bench(args):
    """Ejecuta todas las tareas y escribe las ejecuciones y el reporte.

    Toda la configuración se valida antes de la primera ejecución.
    """
    if args.parallel < 1:
        raise ConfigError('--parallel debe ser al menos 1')
    tasks = read_tasks(args.tasks)
    agente = _config_agente(args)
    cfg = load_backend_config(args.backend)
    pricing = load_pricing(args.pricing)
    _validar_precios(pricing, cfg)
    guiones = _guiones(cfg, tasks)
    workflows = _workflows(args.workflow, tasks)
    mundos = _mundos(args, tasks)
    plan = arm_faults(FaultPlan(args.fault_rate, args.fault_seed))
    carpeta = os.path.join(args.out, 'runs')

    def ejecutar(task):
        return run_task(
            task, workflows[task.task_id], cfg, mundos[task.task_id], agente, carpeta, plan,
            guiones.get(task.task_id)
        )

    logger.info('bench: %d tareas con %d ejecuciones en paralelo', len(tasks), args.parallel)
    with ThreadPoolExecutor(max_workers=args.parallel) as pool:
        registros = list(pool.map(ejecutar, tasks))
    reporte = aggregate_report(registros, tasks, pricing)
    for registro in registros:
        write_run(registro, carpeta)
    write_report(reporte, args.out)
    print(render_report(reporte), end='')
    return EXITO if all(fila['success'] for fila in reporte.rows) else FALLAS


def report(args):
    tasks = read_tasks(args.tasks)
    pricing = load_pricing(args.pricing)
    reporte = aggregate_report(read_runs(args.runs), tasks, pricing)
    write_report(reporte, args.out or args.runs)
    print(render_report(reporte), end='')
    return EXITO if all(fila['success'] for fila in reporte.rows) else FALLAS


def _resumen(registro, pricing):
    respuesta = registro.final_answer or {}
    print(f'respuesta: {respuesta.get("value", "-")} {respuesta.get("text") or ""}'.rstrip())
    for ruta in registro.artifacts:
        print(f'artefacto: {ruta}')
    costo = '-'
    if pricing is not None:
        try:
            costo = f'{compute_cost(registro, pricing):.4f}'
        except UnknownModelPricing:
            pass
    print(f'tokens: {registro.total_tokens}  costo: {costo}  estado: {registro.status}')
    print(f'estados: {" -> ".join(registro.states_visited) or "-"}')


def repl(args, entrada=input):
    """Sesión interactiva: una consulta por línea hasta el fin de la entrada."""
    agente = _config_agente(args)
    cfg = load_backend_config(args.backend)
    guiones = load_replay_bundle(cfg.script) if cfg.kind == 'replay' and cfg.script else {}
    workflow = load_workflow_file(args.workflow) if args.workflow \
        else bundled_workflow('eo_multi')
    mundo = _mundo(args, args.seed)
    pricing = load_pricing(args.pricing) if os.path.exists(args.pricing) else None
    numero = 0
    while True:
        try:
            consulta = entrada('pampero> ').strip()
        except EOFError:
            print()
            return EXITO
        if not consulta:
            continue
        numero += 1
        task = TaskSpec(f'repl_{numero:03d}', consulta, None, (), None)
        try:
            registro = run_task(
                task, workflow, cfg, mundo, agente, args.out, script=guiones.get(task.task_id)
            )
        except (ErrorBackend, ErrorConfiguracion) as error:
            print(f'error: {error}')
            continue
        _resumen(registro, pricing)


def record_fixtures(args):
    cfg = load_backend_config(args.backend)
    historial = Ledger()
    historial.add('system', 'You are an Earth observation analyst. Use the tools provided.')
    historial.add('user', args.query)
    os.makedirs(args.out, exist_ok=True)
    ruta = os.path.join(args.out, f'{cfg.kind}_toolcall')
    try:
        record_fixture(cfg, historial.messages, full_registry(), ruta)
    except ErrorBackend as error:
        print(f'error: {error}', file=sys.stderr)
        return FALLAS
    print(f'fixture grabada en {ruta}')
    return EXITO


def _comunes(parser):
    parser.add_argument('--mode', choices=MODES + ('react-errtrm',), default='stateflow')
    parser.add_argument('--seed', type=int, default=0, help='semilla del mundo')
    parser.add_argument('--out', default='salida', help='carpeta de salida')
    parser.add_argument('--strict-transitions', action='store_true')
    parser.add_argument('--fault-rate', type=float, default=0.0)
    parser.add_argument('--fault-seed', type=int, default=0)
    parser.add_argument('--max-turns', type=int, default=25)
    parser.add_argument('--catalog', help='carpeta de un mundo guardado con gen-catalog')
    parser.add_argument('--workflow', help='archivo .flow o carpeta de workflows')
    parser.add_argument('--backend', required=True, help='configuración YAML del backend')


def crear_parser():
    parser = argparse.ArgumentParser(
        prog='pampero', description='Agente de herramientas guiado por estados para '
                                    'workflows de observación de la Tierra.'
    )
    parser.add_argument('--version', action='version', version=__about__.__version__)
    parser.add_argument('-v', '--verbose', action='count', default=0)
    parser.add_argument('-q', '--quiet', action='count', default=0)
    sub = parser.add_subparsers(dest='comando', required=True)

    p = sub.add_parser('gen-catalog', help='genera y guarda un mundo sintético')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--images', type=int, default=400)
    p.add_argument('--regions', type=int, default=6)
    p.add_argument('--out', required=True)
    p.set_defaults(funcion=gen_catalog)

    p = sub.add_parser('gen-tasks', help='genera tareas y, opcionalmente, guiones de replay')
    p.add_argument('--seed', type=int, default=0, help='semilla de las tareas')
    p.add_argument('--world-seed', type=int, default=0)
    p.add_argument('--images', type=int, default=400)
    p.add_argument('--regions', type=int, default=6)
    p.add_argument('--catalog')
    p.add_argument('--templates', help='archivo YAML de plantillas')
    p.add_argument('-n', type=int, default=15, help='variantes por plantilla')
    p.add_argument('--out', required=True, help='archivo de tareas JSONL')
    p.add_argument('--scripts', help='archivo del paquete de guiones de replay')
    p.add_argument('--workflow', help='archivo .flow o carpeta de workflows')
    p.add_argument('--fault-rate', type=float, default=0.0)
    p.add_argument('--fault-seed', type=int, default=0)
    p.add_argument('--premature-terminate', type=int, metavar='K')
    p.set_defaults(funcion=gen_tasks)

    p = sub.add_parser('run', help='ejecuta una tarea')
    _comunes(p)
    p.add_argument('--tasks', required=True)
    p.add_argument('--task-id')
    p.set_defaults(funcion=run)

    p = sub.add_parser('bench', help='ejecuta un conjunto de tareas y escribe el reporte')
    _comunes(p)
    p.add_argument('--tasks', required=True)
    p.add_argument('--parallel', type=int, default=1)
    p.add_argument('--pricing', default=recursos.PRICING)
    p.set_defaults(funcion=bench)

    p = sub.add_parser('report', help='recalcula el reporte de una carpeta de ejecuciones')
    p.add_argument('--tasks', required=True)
    p.add_argument('--runs', required=True)
    p.add_argument('--pricing', default=recursos.PRICING)
    p.add_argument('--out')
    p.set_defaults(funcion=report)

    p = sub.add_parser('repl', help='sesión interactiva de consultas')
    _comunes(p)
    p.add_argument('--pricing', default=recursos.PRICING)
    p.set_defaults(funcion=repl)

    p = sub.add_parser('record-fixtures', help='graba una solicitud contra un endpoint real')
    p.add_argument('--backend', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--query', default='How many ships are in the xview1 images of region R1?')
    p.set_defaults(funcion=record_fixtures)
    return parser


def main(argv=None):
    args = crear_parser().parse_args(argv)
    configurar_logging(args.verbose - args.quiet)
    try:
        return args.funcion(args)
    except ErrorDiagnosticos as error:
        print(f'error: {error}', file=sys.stderr)
        for diagnostico in error.diagnosticos:
            print(f'  {diagnostico}', file=sys.stderr)
        return ERROR_CONFIGURACION
    except (ErrorConfiguracion, ErrorWorkflow, ErrorTaskgen, UnknownModelPricing) as error:
        print(f'error: {error}', file=sys.stderr)
        return ERROR_CONFIGURACION
    except OSError as error:
        print(f'error: {error.filename}: {error.strerror}', file=sys.stderr)
        return ERROR_CONFIGURACION


if __name__ == '__main__':
    sys.exit(main())
