"""Command line interface: ``python -m eqsolv SUBCOMMAND ...``.

Exit codes: 0 positive verdict, 1 negative verdict, 2 indeterminate (budget
or cap reached, or a bound that is not exact), 64 usage error, 65 malformed
input, 66 missing file, 70 internal disagreement between methods.

Default budgets come from ``EQSOLV_CLOSURE_CAP``, ``EQSOLV_SEARCH_BUDGET``,
``EQSOLV_CUBE_BUDGET`` and ``EQSOLV_SEED`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from pathlib import Path

from .algebra import AlgebraError, AlgebraFileError, FiniteAlgebra, load_algebra
from .closure import DEFAULT_CAP
from .congruence import (DEFAULT_CUBE_BUDGET, CommutatorBudgetError, Partition, SupernilpotencyMismatch,
                         check_supernilpotency, commutator, nilpotency_degree)
from .decomposition import decompose, verify_decomposition
from .hardness import build_ap, coloring_from_witness, is_proper, load_graph, p_colorable, reduce_graph
from .loop import LoopError, derive_loop, find_malcev, with_loop
from .solver import (DEFAULT_SEARCH_BUDGET, brute_force_solve, check_identity, empirical_support_degree,
                     normalize, solve, support_bound)
from .terms import Const, TermError, format_term, parse_term

__all__ = ['main', 'execute', 'CliError']

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_INDETERMINATE = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_NOINPUT, EXIT_SOFTWARE = 64, 65, 66, 70
DATA_DIR = Path(__file__).parent / 'data'


class CliError(Exception):
    def __init__(self, message, code=EXIT_DATA):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f'{self.prog}: {message}', EXIT_USAGE)


def _env_int(name, default):
    try:
        return int(os.environ.get(name, default))
    except ValueError:
        raise CliError(f'{name} must be an integer', EXIT_USAGE) from None


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError('must be positive')
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError('must be non-negative')
    return v


def resolve(path: str) -> Path:
    """A path as given, or else the bundled fixture of that name."""
    p = Path(path)
    if p.exists():
        return p
    if (DATA_DIR / path).exists():
        return DATA_DIR / path
    raise CliError(f'no such file: {path}', EXIT_NOINPUT)


def _algebra(args) -> FiniteAlgebra:
    return load_algebra(resolve(args.algebra))


def _elements(text, what):
    try:
        return [int(v) for v in text.replace(',', ' ').split()]
    except ValueError:
        raise CliError(f'{what} must be a comma separated list of elements', EXIT_USAGE) from None


def _loop(algebra, malcev_text=None, zero=None, cap=DEFAULT_CAP):
    if malcev_text is not None:
        malcev = parse_term(malcev_text, algebra)
    else:
        found = find_malcev(algebra, cap=cap)
        if found.term is None:
            status = 'none exists' if found.saturated else 'search cap reached'
            raise CliError(f'no Mal\'cev term found ({status})', EXIT_INDETERMINATE)
        malcev = found.term
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        loop = derive_loop(algebra, malcev, zero, check_nilpotent=False)
    return malcev, loop


def _table_lines(table):
    return [' '.join(str(int(v)) for v in row) for row in table]


def _nu(algebra, args):
    res, order = check_supernilpotency(algebra, cap=args.cap, max_arity=args.max_arity,
                                       budget=args.cube_budget)
    return res, order


# subcommands; each returns (exit code, record, text lines)

def cmd_analyze(args):
    A = _algebra(args)
    rec = {'algebra': args.algebra, 'size': A.size, 'zero': A.zero}
    out = [f'algebra: {args.algebra} (N = {A.size}, zero {A.zero})']
    found = find_malcev(A, cap=args.cap)
    rec['malcev'] = format_term(found.term) if found.term is not None else None
    out.append(f'malcev term: {rec["malcev"] or "none found"}')
    code = EXIT_POSITIVE
    if found.term is not None and A.zero is not None:
        _, loop = _loop(A, format_term(found.term))
        rec['e'] = loop.exponent
        out.append(f'e: {loop.exponent}')
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            one = Partition.total(A.size)
            c11 = commutator(A, [one, one], budget=args.cube_budget, malcev=found.term is not None)
            deg = nilpotency_degree(A, budget=args.cube_budget, malcev=found.term is not None)
        rec['nilpotency_degree'] = deg
        rec['commutator_1_1'] = c11.classes()
        out.append(f'nilpotency degree: {deg if deg is not None else "not nilpotent (up to cap)"}')
    except CommutatorBudgetError as exc:
        rec['nilpotency_degree'] = None
        out.append(f'nilpotency degree: indeterminate ({exc})')
        code = EXIT_INDETERMINATE
        c11 = None
    if A.zero is not None:
        res, order = _nu(A, args)
        rec.update(nu=res.degree, nu_status=res.status, cube_order=order)
        shown = res.degree if res.status == 'exact' else res.status.replace('-', ' ')
        out.append(f'nu: {shown}')
        out.append(f'cube commutator vanishing order: {order if order is not None else "not reached"}')
        if res.status == 'indeterminate':
            code = EXIT_INDETERMINATE
    if c11 is not None:
        out.append('[1,1]:')
        out.extend(' '.join(map(str, c)) for c in c11.classes())
    return code, rec, out


def cmd_loop_derive(args):
    A = _algebra(args)
    try:
        malcev, loop = _loop(A, args.malcev, args.zero, args.cap)
    except LoopError as exc:
        raise CliError(str(exc), EXIT_NEGATIVE) from None
    rec = {'algebra': args.algebra, 'malcev': format_term(malcev), 'zero': loop.zero, 'e': loop.exponent,
           'mul': loop.mul.tolist(), 'ldiv': loop.ldiv.tolist(), 'rdiv': loop.rdiv.tolist()}
    out = [f'malcev term: {format_term(malcev)}', f'zero: {loop.zero}', 'x*y:', *_table_lines(loop.mul),
           'x\\y:', *_table_lines(loop.ldiv), 'y/x (row y, column x):', *_table_lines(loop.rdiv),
           f'e: {loop.exponent}']
    return EXIT_POSITIVE, rec, out


def cmd_decompose(args):
    A = _algebra(args)
    _, loop = _loop(A, args.malcev, cap=args.cap)
    AL = with_loop(A, loop)
    f = parse_term(args.term, AL)
    base = _elements(args.base, '--base')
    enum = _elements(args.enumeration, '--enumeration') if args.enumeration else None
    nu = args.nu
    if nu is None:
        res, _ = _nu(A, args)
        nu = res.degree if res.status == 'exact' else None
    try:
        d = decompose(f, A, loop, enum, base, depth_cap=args.depth, nu=nu, m=len(base))
    except AlgebraError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    rep = verify_decomposition(d, exhaustive_limit=args.exhaustive_limit, seed=args.seed)
    rec = {'algebra': args.algebra, 'term': args.term, 'base': list(d.base), 'enumeration': list(d.enumeration),
           'nu': nu, 'depth': d.depth, 'complete': d.complete,
           'factors': [format_term(r) if r.length <= args.max_length or args.full else None for r in d.factors],
           'verified': rep.passed, 'exhaustive': rep.exhaustive, 'checked': rep.checked,
           'failures': rep.failures}
    out = d.describe(max_length=args.max_length, full=args.full).splitlines()
    if not d.complete:
        out.append(f'note: stopped at r_{d.depth}; factors above are not known to vanish')
    out.extend(rep.summary().splitlines())
    code = EXIT_POSITIVE if rep.passed else EXIT_NEGATIVE
    if rep.passed and not d.complete:
        code = EXIT_INDETERMINATE
    return code, rec, out


def _bound(A, loop, args):
    res, order = _nu(A, args)
    if res.status != 'exact':
        return None, res, None
    emp = None
    if args.d is not None:
        b = support_bound(A, loop, res.degree, args.d, 'user-supplied')
    else:
        emp = empirical_support_degree(A, max_arity=args.cert_arity, seed=args.seed, cap=args.cap)
        b = support_bound(A, loop, res.degree)
        if b.d_practical is None or emp.certified:
            b.d_practical, b.provenance = emp.d, 'empirical'
    return b, res, emp


def cmd_bound(args):
    A = _algebra(args)
    _, loop = _loop(A, cap=args.cap)
    b, res, emp = _bound(A, loop, args)
    if b is None:
        rec = {'algebra': args.algebra, 'e': loop.exponent, 'nu': None, 'nu_status': res.status}
        return EXIT_INDETERMINATE, rec, [f'e: {loop.exponent}', f'nu: {res.status.replace("-", " ")}',
                                         'no bound: the algebra is not known to be supernilpotent']
    rec = {'algebra': args.algebra, 'e': b.e, 'nu': b.nu, 'l': b.l, 'k': str(b.k), 'd': b.d_text(),
           'd_practical': b.d_practical, 'provenance': b.provenance}
    k = str(b.k)
    out = [f'e: {b.e}', f'nu: {b.nu}', f'l: {b.l}', f'k: {k if len(k) <= 60 else k[:20] + f"...({len(k)} digits)"}',
           f'd: {b.d_text()}', f'd_practical: {b.d_practical} ({b.provenance})']
    if emp is not None:
        rec.update(d_practical_status=emp.status, certification_arity=emp.arity)
        out.append(f'd_practical status: {emp.status} at arity {emp.arity} ({emp.method})')
    return EXIT_POSITIVE, rec, out


def _search_setup(args, terms):
    A = _algebra(args)
    _, loop = _loop(A, args.malcev, cap=args.cap)
    AL = with_loop(A, loop)
    parsed = [parse_term(t, AL) for t in terms]
    m = max((max(t.variables, default=0) for t in parsed), default=0)
    certified = False
    if args.mode == 'exact':
        d = m
    elif args.d is not None:
        d = args.d
    else:
        emp = empirical_support_degree(A, max_arity=args.cert_arity, seed=args.seed, cap=args.cap)
        d = emp.d
        # a certificate at arity m0 covers every polynomial of arity <= m0
        certified = emp.certified and m <= emp.arity
    return AL, loop, parsed, m, d, certified


def _verdict_code(rep):
    if rep.positive:
        return EXIT_POSITIVE
    return EXIT_NEGATIVE if rep.exact else EXIT_INDETERMINATE


def _report_lines(rep):
    out = [f'verdict: {rep.verdict}', f'mode: {rep.mode} (d = {rep.bound}, {"exact" if rep.exact else "bound-conditional"})']
    if rep.witness is not None:
        out.append('witness: ' + ', '.join(f'x{i}={v}' for i, v in enumerate(rep.witness, 1)))
    if rep.value is not None and rep.verdict == 'identity-fails':
        out.append(f'value: {rep.value}')
    out.append(f'evaluations: {rep.evaluations}')
    return out


def cmd_solve(args):
    AL, loop, (f, g), m, d, cert = _search_setup(args, [args.lhs, args.rhs])
    h = normalize(f, g, loop)
    if args.mode == 'exact' and AL.size ** m > args.search_budget:
        raise CliError(f'{AL.size}**{m} assignments exceed the search budget', EXIT_INDETERMINATE)
    rep = solve(h, AL, d, loop, m, certified=cert)
    rec = {'algebra': args.algebra, 'lhs': args.lhs, 'rhs': args.rhs, **rep.record()}
    return _verdict_code(rep), rec, _report_lines(rep)


def cmd_id_check(args):
    AL, loop, (h,), m, d, cert = _search_setup(args, [args.term])
    if args.rhs is not None:
        h = normalize(h, parse_term(args.rhs, AL), loop)
    rep = check_identity(h, AL, d, loop, m, certified=cert)
    rec = {'algebra': args.algebra, 'term': args.term, **rep.record()}
    return _verdict_code(rep), rec, _report_lines(rep)


def cmd_reduce(args):
    g = load_graph(resolve(args.graph))
    t = reduce_graph(g, args.p)
    text = format_term(t)
    rec = {'graph': args.graph, 'p': args.p, 'vertices': g.vertices, 'edges': [list(e) for e in g.edges],
           'length': t.length}
    if args.emit_term:
        Path(args.emit_term).write_text(text + '\n', encoding='utf-8')
        rec['emitted'] = args.emit_term
        out = [f'wrote t_G (length {t.length}) to {args.emit_term}']
    else:
        rec['term'] = text
        out = [text]
    return EXIT_POSITIVE, rec, out


def cmd_hardness_demo(args):
    g = load_graph(resolve(args.graph))
    p = args.p
    A = build_ap(p)
    _, loop = _loop(A, 'plus(plus(x1, neg(x2)), x3)')
    AL = with_loop(A, loop)
    t = reduce_graph(g, p)
    h = normalize(t, Const(p), loop)
    m = g.vertices
    if A.size ** m <= args.search_budget:
        rep = brute_force_solve(h, AL, loop, m, budget=args.search_budget)
    else:
        rep = solve(h, AL, m, loop, m)
    oracle = p_colorable(g, p, budget=args.search_budget)
    rec = {'graph': args.graph, 'p': p, 'solvable': rep.verdict == 'solvable', 'colorable': oracle,
           'witness': list(rep.witness) if rep.witness else None}
    out = [f'graph: {g.vertices} vertices, {len(g.edges)} edges; t_G has length {t.length}',
           f't_G = {p}: {rep.verdict}' + (f', witness {rep.witness}' if rep.witness else '')]
    if rep.witness is not None:
        col = coloring_from_witness(rep.witness, p)
        rec['coloring'] = list(col)
        rec['proper'] = is_proper(g, col)
        out.append(f'colouring from cosets: {col} ({"proper" if rec["proper"] else "IMPROPER"})')
    out.append(f'brute-force {p}-colourable: {oracle}')
    agree = oracle == (rep.verdict == 'solvable') and rec.get('proper', True)
    rec['agree'] = agree
    out.append('agreement: ' + ('yes' if agree else 'NO'))
    if not agree:
        return EXIT_SOFTWARE, rec, out
    return (EXIT_POSITIVE if oracle else EXIT_NEGATIVE), rec, out


def cmd_batch(args):
    path = resolve(args.manifest)
    cases = []
    for lineno, line in enumerate(path.read_text(encoding='utf-8').splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        try:
            case = json.loads(line)
            if not isinstance(case.get('args'), list):
                raise ValueError('"args" must be a list')
        except ValueError as exc:
            raise CliError(f'{path}:{lineno}: {exc}', EXIT_DATA) from None
        cases.append((lineno, case))
    out, results, failed = [], [], 0
    if not cases:
        print('warning: empty manifest, nothing to run', file=sys.stderr)
    for lineno, case in cases:
        name = case.get('name', f'line {lineno}')
        code, rec, _ = execute(case['args'])
        expect = case.get('expect', {})
        diffs = []
        if 'exit' in expect and expect['exit'] != code:
            diffs.append(f'exit: expected {expect["exit"]}, got {code}')
        for key, want in expect.items():
            if key != 'exit' and rec.get(key) != want:
                diffs.append(f'{key}: expected {want!r}, got {rec.get(key)!r}')
        ok = not diffs
        failed += not ok
        results.append({'name': name, 'ok': ok, 'exit': code, 'diff': diffs})
        out.append(f'{"PASS" if ok else "FAIL"} {name}')
        out.extend(f'  {d}' for d in diffs)
    out.append(f'{len(cases) - failed}/{len(cases)} cases passed')
    rec = {'manifest': args.manifest, 'cases': len(cases), 'failed': failed, 'results': results}
    return (EXIT_NEGATIVE if failed else EXIT_POSITIVE), rec, out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--format', choices=['text', 'json'], default='text')
    common.add_argument('--seed', type=int, default=_env_int('EQSOLV_SEED', 0))
    common.add_argument('--cap', type=_positive, default=_env_int('EQSOLV_CLOSURE_CAP', DEFAULT_CAP),
                        help='closure cap (number of listed tables)')
    common.add_argument('--search-budget', type=_positive,
                        default=_env_int('EQSOLV_SEARCH_BUDGET', DEFAULT_SEARCH_BUDGET))
    common.add_argument('--cube-budget', type=_positive, default=_env_int('EQSOLV_CUBE_BUDGET', DEFAULT_CUBE_BUDGET))
    common.add_argument('--threads', type=_positive, default=1, help='accepted for compatibility; work is serial')
    common.add_argument('--timing', action='store_true', help='add elapsed seconds to json records')

    p = _Parser(prog='eqsolv', description='Equations and identities over finite Mal\'cev algebras.')
    sub = p.add_subparsers(dest='command', required=True, parser_class=_Parser)

    def add(name, func, help):
        s = sub.add_parser(name, parents=[common], help=help, description=help)
        s.set_defaults(func=func)
        return s

    def structure(s):
        s.add_argument('--max-arity', type=_positive, default=4, help='largest arity tried for nu')

    s = add('analyze', cmd_analyze, 'nilpotency degree, nu, e and [1,1]')
    s.add_argument('--algebra', required=True)
    structure(s)

    s = add('loop-derive', cmd_loop_derive, 'loop tables x*y = m(x,0,y) and the exponent')
    s.add_argument('--algebra', required=True)
    s.add_argument('--malcev')
    s.add_argument('--zero', type=_nonneg)

    s = add('decompose', cmd_decompose, 'absorbing decomposition r_0..r_m of a polynomial')
    s.add_argument('--algebra', required=True)
    s.add_argument('--term', required=True)
    s.add_argument('--base', required=True)
    s.add_argument('--enumeration')
    s.add_argument('--malcev')
    s.add_argument('--nu', type=_positive)
    s.add_argument('--depth', type=_nonneg)
    s.add_argument('--full', action='store_true', help='print long terms in full')
    s.add_argument('--max-length', type=_positive, default=400)
    s.add_argument('--exhaustive-limit', type=_positive, default=10 ** 5)
    structure(s)

    def search(s):
        s.add_argument('--algebra', required=True)
        s.add_argument('--mode', choices=['exact', 'bounded'], default='exact')
        s.add_argument('--d', type=_nonneg)
        s.add_argument('--malcev')
        s.add_argument('--cert-arity', type=_positive, default=4)

    s = add('bound', cmd_bound, 'support bound: e, nu, l, k, d, d_practical')
    s.add_argument('--algebra', required=True)
    s.add_argument('--d', type=_nonneg, help='user-supplied practical bound')
    s.add_argument('--cert-arity', type=_positive, default=4)
    structure(s)

    s = add('solve', cmd_solve, 'is lhs = rhs solvable?')
    search(s)
    s.add_argument('--lhs', required=True)
    s.add_argument('--rhs', required=True)

    s = add('id-check', cmd_id_check, 'does term = 0 (or = rhs) hold identically?')
    search(s)
    s.add_argument('--term', required=True)
    s.add_argument('--rhs')

    s = add('reduce', cmd_reduce, 'the term t_G for a graph')
    s.add_argument('--graph', required=True)
    s.add_argument('--p', type=int, default=3)
    s.add_argument('--emit-term')

    s = add('hardness-demo', cmd_hardness_demo, 'solve t_G = p and compare with colourability')
    s.add_argument('--graph', required=True)
    s.add_argument('--p', type=int, default=3)

    s = add('batch', cmd_batch, 'run a JSON-lines manifest of commands with expectations')
    s.add_argument('manifest')
    return p


def execute(argv):
    """Run one command; return ``(exit code, record, text lines)`` without printing."""
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            code, rec, out = args.func(args)
        notes = sorted({str(w.message) for w in caught})
        out = [*out, *(f'warning: {msg}' for msg in notes)]
        rec = {'command': args.command, 'exit': code, 'seed': args.seed, **rec}
        if notes:
            rec['warnings'] = notes
        if args.timing:
            rec['timing'] = round(time.perf_counter() - start, 6)
        return code, rec, out
    except CliError as exc:
        return exc.code, {'command': argv[0] if argv else None, 'exit': exc.code, 'error': str(exc)}, [f'error: {exc}']
    except (AlgebraFileError, TermError) as exc:
        return EXIT_DATA, {'command': argv[0] if argv else None, 'exit': EXIT_DATA, 'error': str(exc)}, [f'error: {exc}']
    except (CommutatorBudgetError,) as exc:
        return EXIT_INDETERMINATE, {'command': argv[0], 'exit': EXIT_INDETERMINATE, 'error': str(exc)}, [f'indeterminate: {exc}']
    except SupernilpotencyMismatch as exc:
        return EXIT_SOFTWARE, {'command': argv[0], 'exit': EXIT_SOFTWARE, 'error': str(exc)}, [f'error: {exc}']
    except AlgebraError as exc:
        return EXIT_DATA, {'command': argv[0] if argv else None, 'exit': EXIT_DATA, 'error': str(exc)}, [f'error: {exc}']


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ('-h', '--help') or not argv:
        build_parser().print_help()
        return 0 if argv else EXIT_USAGE
    wants_json = '--format' in argv and argv[argv.index('--format') + 1:argv.index('--format') + 2] == ['json']
    code, rec, out = execute(argv)
    if wants_json:
        print(json.dumps(rec, sort_keys=True))
    else:
        stream = sys.stderr if 'error' in rec else sys.stdout
        print('\n'.join(out), file=stream)
    return code
