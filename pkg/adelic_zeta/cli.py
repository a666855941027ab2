"""
Batch command line: ``adelic-zeta <group> <command> [options]``.

Results go to stdout as JSON lines (``--emit json``, default) or CSV (``--emit csv``).
Errors go to stderr as ``{"error": code, "message": text}`` with exit status 1. Usage errors exit with status 2.
"""

__all__ = ['main', 'build_parser', 'parse_complex']

import os
import io
import sys
import csv
import json
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor

from adelic_zeta.errors import AdelicZetaError
from adelic_zeta.field_data import NumberFieldData, BUILTIN_FIELDS, builtin_field, load_field, rationals
from adelic_zeta.lattice import load_lattice
from adelic_zeta.cohomology import counts, rr_residual, serre_residual
from adelic_zeta.stability import hn_filtration, is_semistable, is_stable
from adelic_zeta.moduli import QuadratureSpec, build_chart, moduli_volume
from adelic_zeta.zeta import FEScan, Method, ZetaFunction, ZetaPoint, ZetaSpec
from adelic_zeta.tools import LOGGER_NAME, thread_cap

from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple, TypeVar

T = TypeVar('T')
R = TypeVar('R')

INVALID_PARAMETER = 'invalid-parameter'
ZETA_CSV_COLUMNS = ['s_re', 's_im', 'val_re', 'val_im', 'err', 'method']


def parse_complex(text: str) -> complex:
    """``re,im`` or a plain real number"""
    parts = text.split(',')
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError('Expected re,im but got %r' % text)


def _resolve_field(ref: str) -> NumberFieldData:
    if ref == 'Q':
        return rationals()
    if ref in BUILTIN_FIELDS and not os.path.exists(ref):
        return builtin_field(ref)
    return load_field(ref)


def _parallel_map(func: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Maps in a thread pool capped by ADELIC_ZETA_THREADS. Results keep the input order"""
    workers = min(thread_cap(), max(1, len(items)))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


class _Emitter:
    def __init__(self, fmt: str, out: TextIO) -> None:
        self.fmt = fmt
        self.out = out

    def records(self, rows: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> None:
        if self.fmt == 'json':
            for row in rows:
                self.out.write(json.dumps(row, sort_keys=True) + '\n')
            return
        if columns is None:
            columns = sorted({k for row in rows for k in row.keys()})
        writer = csv.writer(self.out, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(c)) for c in columns])

    def zeta_points(self, points: List[ZetaPoint]) -> None:
        if self.fmt == 'json':
            self.records([p.to_dict() for p in points])
            return
        rows = [{'s_re': p.s.real, 's_im': p.s.imag, 'val_re': p.value.real, 'val_im': p.value.imag, 'err': p.err, 'method': p.method} for p in points]
        self.records(rows, ZETA_CSV_COLUMNS)


def _csv_cell(val: Any) -> str:
    if val is None:
        return ''
    if isinstance(val, (list, dict)):
        return json.dumps(val, sort_keys=True)
    if isinstance(val, float):
        return repr(val)
    return str(val)


# ---- commands ------------------------------------------------------------

def _cmd_field_check(args: argparse.Namespace, emit: _Emitter) -> None:
    f = _resolve_field(args.file)
    emit.records([{
        'ok': True,
        'name': f.name,
        'degree': f.degree,
        'signature': [f.r1, f.r2],
        'discriminant': f.discriminant,
        'roots_of_unity': f.roots_of_unity,
        'class_number': f.class_number,
        'regulator': f.regulator,
    }])


def _cmd_cohom_rr(args: argparse.Namespace, emit: _Emitter) -> None:
    emit.records([rr_residual(load_lattice(args.lattice), args.tol).to_dict()])


def _cmd_cohom_serre(args: argparse.Namespace, emit: _Emitter) -> None:
    emit.records([serre_residual(load_lattice(args.lattice), args.tol).to_dict()])


def _cmd_cohom_counts(args: argparse.Namespace, emit: _Emitter) -> None:
    emit.records([counts(load_lattice(args.lattice), args.tol).to_dict()])


def _cmd_stab_test(args: argparse.Namespace, emit: _Emitter) -> None:
    lat = load_lattice(args.lattice)
    semi = is_semistable(lat, allow_uncertified=args.allow_uncertified)
    stable = is_stable(lat, allow_uncertified=args.allow_uncertified)
    emit.records([{
        'semistable': semi.holds,
        'stable': stable.holds,
        'slope': semi.slope,
        'max_sub_slope': semi.max_sub_slope,
        'certificate': None if semi.certificate is None else semi.certificate.to_dict(),
        'certified': semi.certified,
    }])


def _cmd_stab_hn(args: argparse.Namespace, emit: _Emitter) -> None:
    emit.records([hn_filtration(load_lattice(args.lattice), allow_uncertified=args.allow_uncertified).to_dict()])


def _cmd_moduli_volume(args: argparse.Namespace, emit: _Emitter) -> None:
    field = _resolve_field(args.field)
    chart = build_chart(field, args.rank)
    emit.records([{
        'field': field.name,
        'rank': args.rank,
        'chart': chart.kind,
        'volume': moduli_volume(field, args.rank),
        'quadrature_volume': chart.volume(1.0, _quadrature(args)),
    }])


def _quadrature(args: argparse.Namespace) -> QuadratureSpec:
    if getattr(args, 'quadrature', None) is None:
        return QuadratureSpec()
    try:
        with open(args.quadrature, 'r', encoding='utf-8') as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError('Cannot read quadrature spec %s: %s' % (args.quadrature, e))
    return QuadratureSpec.from_dict(data)


def _zeta_function(args: argparse.Namespace) -> ZetaFunction:
    spec = ZetaSpec(field=_resolve_field(args.field), rank=args.rank, A=args.A, B=args.B, C=args.C,
                    quadrature=_quadrature(args), tol=args.tol)
    return ZetaFunction(spec)


def _cmd_zeta_eval(args: argparse.Namespace, emit: _Emitter) -> None:
    fn = _zeta_function(args)
    batches = _parallel_map(lambda s: fn.evaluate(s, args.method), args.s)
    emit.zeta_points([p for batch in batches for p in batch])


def _read_grid(path: str) -> List[complex]:
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError('Cannot read grid %s: %s' % (path, e))
    if not isinstance(data, list):
        raise ValueError('Grid must be a JSON list of [re, im] pairs')
    out = []
    for item in data:
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(complex(item, 0.0))
        elif isinstance(item, list) and len(item) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item):
            out.append(complex(item[0], item[1]))
        else:
            raise ValueError('Invalid grid entry %r' % (item,))
    return out


def _cmd_zeta_fescan(args: argparse.Namespace, emit: _Emitter) -> None:
    fn = _zeta_function(args)
    grid = _read_grid(args.grid)
    parts = _parallel_map(lambda s: fn.fe_scan([s]), grid)
    paths = [p.path_residual for p in parts if p.path_residual is not None]
    errs = [p.combined_err for p in parts if p.combined_err is not None]
    scan = FEScan(symmetry_residual=max([p.symmetry_residual for p in parts], default=0.0),
                  relative_symmetry_residual=max([p.relative_symmetry_residual for p in parts], default=0.0),
                  path_residual=max(paths) if paths else None,
                  combined_err=max(errs) if errs else None,
                  points=len(grid),
                  path_points=len(paths))
    emit.records([scan.to_dict()])


def _cmd_zeta_residues(args: argparse.Namespace, emit: _Emitter) -> None:
    emit.records([_zeta_function(args).residues().to_dict()])


# ---- parser --------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument('--emit', choices=['json', 'csv'], default='json', help='Output format')
    p.add_argument('-v', '--verbose', action='count', default=0, help='Log to stderr (-vv for debug)')


def _add_lattice(p: argparse.ArgumentParser, tol: bool = True) -> None:
    p.add_argument('--lattice', required=True, help='Lattice JSON file')
    if tol:
        p.add_argument('--tol', type=float, default=1e-14, help='Theta tail tolerance')


def _add_zeta(p: argparse.ArgumentParser) -> None:
    p.add_argument('--field', required=True, help='Field JSON file, "Q" or a builtin field name')
    p.add_argument('--rank', type=int, required=True)
    p.add_argument('--A', type=float, default=1.0)
    p.add_argument('--B', type=float, default=-1.0)
    p.add_argument('--C', type=float, default=0.0)
    p.add_argument('--tol', type=float, default=1e-11)
    p.add_argument('--quadrature', default=None, help='Quadrature spec JSON file')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='adelic-zeta', description='Arithmetic cohomology, stability and non-abelian zeta functions of number fields')
    groups = parser.add_subparsers(dest='group', required=True)

    field = groups.add_parser('field').add_subparsers(dest='command', required=True)
    p = field.add_parser('check', help='Load and validate a field file')
    p.add_argument('file')
    _add_common(p)
    p.set_defaults(func=_cmd_field_check)

    cohom = groups.add_parser('cohom').add_subparsers(dest='command', required=True)
    for name, func in (('rr', _cmd_cohom_rr), ('serre', _cmd_cohom_serre), ('counts', _cmd_cohom_counts)):
        p = cohom.add_parser(name)
        _add_lattice(p)
        _add_common(p)
        p.set_defaults(func=func)

    stab = groups.add_parser('stab').add_subparsers(dest='command', required=True)
    for name, func in (('test', _cmd_stab_test), ('hn', _cmd_stab_hn)):
        p = stab.add_parser(name)
        _add_lattice(p, tol=False)
        p.add_argument('--allow-uncertified', action='store_true', help='Best-effort answer above the certified rank')
        _add_common(p)
        p.set_defaults(func=func)

    moduli = groups.add_parser('moduli').add_subparsers(dest='command', required=True)
    p = moduli.add_parser('volume')
    p.add_argument('--field', required=True)
    p.add_argument('--rank', type=int, required=True)
    p.add_argument('--quadrature', default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_moduli_volume)

    zeta = groups.add_parser('zeta').add_subparsers(dest='command', required=True)
    p = zeta.add_parser('eval')
    _add_zeta(p)
    p.add_argument('--s', type=parse_complex, action='append', required=True, help='re,im (repeatable)')
    p.add_argument('--method', choices=[Method.DIRECT, Method.CONTINUED, Method.BOTH, Method.COMPACT], default=Method.CONTINUED)
    _add_common(p)
    p.set_defaults(func=_cmd_zeta_eval)

    p = zeta.add_parser('fescan')
    _add_zeta(p)
    p.add_argument('--grid', required=True, help='JSON list of [re, im] pairs')
    _add_common(p)
    p.set_defaults(func=_cmd_zeta_fescan)

    p = zeta.add_parser('residues')
    _add_zeta(p)
    _add_common(p)
    p.set_defaults(func=_cmd_zeta_residues)

    return parser


def _setup_logging(verbosity: int) -> Tuple[Optional[logging.Handler], int]:
    """Returns the added handler and the level to restore afterward"""
    logger = logging.getLogger(LOGGER_NAME)
    previous = logger.level
    if verbosity <= 0:
        return None, previous
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('(%(relativeCreated)d) [%(name)s] %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbosity > 1 else logging.INFO)
    return handler, previous


def _error(stderr: TextIO, code: str, message: str) -> int:
    stderr.write(json.dumps({'error': code, 'message': message}, sort_keys=True) + '\n')
    return 1


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    out = sys.stdout if stdout is None else stdout
    err = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2

    handler, previous_level = _setup_logging(args.verbose)
    buffer = io.StringIO()
    try:
        args.func(args, _Emitter(args.emit, buffer))
    except AdelicZetaError as e:
        return _error(err, e.code, str(e))
    except ValueError as e:
        return _error(err, INVALID_PARAMETER, str(e))
    finally:
        if handler is not None:
            logging.getLogger(LOGGER_NAME).removeHandler(handler)
            logging.getLogger(LOGGER_NAME).setLevel(previous_level)
    out.write(buffer.getvalue())
    return 0
