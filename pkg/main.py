#!/usr/bin/env python3
"""
Main entry point for the Quantum Relations Toolkit
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import get_config
from core import finite_relations as fr
from core import quantum_relation as qr
from core import quantum_torus as qt
from core.errors import (ConfigError, GuardExceededError, ParseError, QRelError,
                         ShapeMismatchError, ValidationError)
from core.intrinsic import (BimoduleAction, ideal_from_elements, ideal_of_relation,
                            projection_form, relation_of_complement, relation_of_ideal,
                            relation_of_projection, separate)
from core.reflexivity import (is_relatively_reflexive, masa_relative_closure,
                              reflexive_closure, tensor_identity_report)
from core.scalars import ScalarField, field_for
from core.subspace import OperatorSubspace
from core.vn_algebra import VonNeumannAlgebra, center, diagonal_masa, is_masa
from utils import serialization as io
from utils.i18n import i18n, resolve_locale

logger = logging.getLogger('qrel.cli')

EPILOG = """
Examples:
  python main.py classify upper.json --algebra diagonal3.json
  python main.py from-relation pairs.json --format both --lang es
  python main.py reflexive span.json --samples 200 --seed 0
  python main.py separate relation.json operator.json
  python main.py torus-cesaro operator.json --order 4 --norm
"""


# Input helpers

def _algebra_for(args, field: ScalarField, n: int) -> VonNeumannAlgebra:
    if getattr(args, 'algebra', None):
        algebra = io.decode_algebra(io.load_file(args.algebra), field)
        if algebra.n != n:
            raise ShapeMismatchError(f"Algebra acts on C^{algebra.n} but the input is {n}x{n}")
        return algebra
    return diagonal_masa(n, field)


def _size_of(obj: Any, matrices: List) -> int:
    n = io.matrix_size(obj)
    if n is None:
        if not matrices:
            raise ValidationError("An empty generator list needs an explicit 'n'")
        n = matrices[0].rows
    return n


def _is_classical(obj: Any) -> bool:
    return isinstance(obj, dict) and 'pairs' in obj


def _quantum_relation(path: str, args, field: ScalarField) -> qr.QuantumRelation:
    obj = io.load_file(path)
    if _is_classical(obj):
        relation = io.decode_relation(obj)
        return qr.from_classical(_algebra_for(args, field, relation.base.size), relation)
    matrices = io.decode_matrices(obj, field)
    algebra = _algebra_for(args, field, _size_of(obj, matrices))
    return qr.generate_relation(algebra, matrices)


def _relation_payload(relation: qr.QuantumRelation) -> Dict[str, Any]:
    return {'n': relation.n, 'dim': relation.dim, 'relation': io.encode_space(relation.space)}


def _classical_payload(relation: fr.MeasurableRelationFin) -> Dict[str, Any]:
    payload = io.encode_relation(relation.underlying)
    payload['class'] = fr.classify(relation).value
    return payload


def _properties(flags: Dict[str, bool]) -> Dict[str, Any]:
    return {key: flags[key] for key in ('reflexive', 'symmetric', 'antisymmetric', 'transitive')}


# Commands

def cmd_commutant(args, field: ScalarField) -> Dict[str, Any]:
    algebra = io.decode_algebra(io.load_file(args.input), field)
    return {
        'algebra_dim': algebra.dim,
        'commutant_dim': algebra.commutant_space.dim,
        'algebra': io.encode_space(algebra.space),
        'commutant': io.encode_space(algebra.commutant_space)
    }


def cmd_generate_algebra(args, field: ScalarField) -> Dict[str, Any]:
    algebra = io.decode_algebra(io.load_file(args.input), field)
    return {
        'n': algebra.n,
        'algebra_dim': algebra.dim,
        'center_dim': center(algebra).dim,
        'is_masa': is_masa(algebra),
        'algebra': io.encode_space(algebra.space)
    }


def cmd_generate_relation(args, field: ScalarField) -> Dict[str, Any]:
    return _relation_payload(_quantum_relation(args.input, args, field))


def cmd_classify(args, field: ScalarField) -> Dict[str, Any]:
    obj = io.load_file(args.input)
    if _is_classical(obj) and not args.algebra:
        relation = fr.from_relation(io.decode_relation(obj))
        flags = {
            'reflexive': fr.is_reflexive(relation),
            'symmetric': fr.is_symmetric(relation),
            'antisymmetric': fr.is_antisymmetric(relation),
            'transitive': fr.is_transitive(relation)
        }
        return dict(_properties(flags), **{'class': fr.classify(relation).value,
                                          'pairs': relation.underlying.sorted_pairs()})
    relation = _quantum_relation(args.input, args, field)
    payload = _properties(qr.properties(relation))
    payload.update({'class': qr.classify(relation).value, 'dim': relation.dim, 'n': relation.n})
    return payload


def cmd_product(args, field: ScalarField) -> Dict[str, Any]:
    left_obj = io.load_file(args.left)
    right_obj = io.load_file(args.right)
    if _is_classical(left_obj) and _is_classical(right_obj) and not args.algebra:
        left = fr.from_relation(io.decode_relation(left_obj))
        right = fr.from_relation(io.decode_relation(right_obj))
        return _classical_payload(fr.compose(left, right))
    left = _quantum_relation(args.left, args, field)
    right = _quantum_relation(args.right, args, field)
    return _relation_payload(qr.product(left, right))


def cmd_transpose(args, field: ScalarField) -> Dict[str, Any]:
    obj = io.load_file(args.input)
    if _is_classical(obj) and not args.algebra:
        return _classical_payload(fr.transpose(fr.from_relation(io.decode_relation(obj))))
    return _relation_payload(qr.transpose(_quantum_relation(args.input, args, field)))


def cmd_from_relation(args, field: ScalarField) -> Dict[str, Any]:
    relation = io.decode_relation(io.load_file(args.input))
    quantum = qr.from_classical(diagonal_masa(relation.base.size, field), relation)
    payload = _relation_payload(quantum)
    payload.update(io.encode_finset(relation.base))
    return payload


def cmd_to_relation(args, field: ScalarField) -> Dict[str, Any]:
    obj = io.load_file(args.input)
    matrices = io.decode_matrices(obj, field)
    n = _size_of(obj, matrices)
    relation = qr.generate_relation(diagonal_masa(n, field), matrices)
    base = io.decode_finset(obj) if isinstance(obj, dict) and 'atoms' in obj else None
    return io.encode_relation(qr.to_classical(relation, base))


def cmd_lattice(args, field: ScalarField) -> Dict[str, Any]:
    relation = fr.from_relation(io.decode_relation(io.load_file(args.input)))
    return io.encode_lattice(fr.lattice_of_preorder(relation))


def cmd_preorder(args, field: ScalarField) -> Dict[str, Any]:
    lattice = io.decode_lattice(io.load_file(args.input))
    return _classical_payload(fr.preorder_of_lattice(lattice))


def cmd_ideal(args, field: ScalarField) -> Dict[str, Any]:
    ideal = ideal_of_relation(_quantum_relation(args.input, args, field))
    return {'ideal_dim': ideal.dim, 'ideal': io.encode_ideal(ideal)}


def _action_for(args, field: ScalarField, first_matrix_size: int) -> BimoduleAction:
    return BimoduleAction(_algebra_for(args, field, first_matrix_size))


def cmd_from_ideal(args, field: ScalarField) -> Dict[str, Any]:
    elements = io.decode_ideal_elements(io.load_file(args.input), field)
    sizes = {a.rows for e in elements for a, _ in e.terms}
    if len(sizes) != 1:
        raise ValidationError("Ideal elements must be nonempty and share one size",
                              witness=sorted(sizes))
    action = _action_for(args, field, sizes.pop())
    return _relation_payload(relation_of_ideal(ideal_from_elements(action, elements)))


def cmd_projection(args, field: ScalarField) -> Dict[str, Any]:
    obj = io.load_file(args.input)
    if isinstance(obj, dict) and 'projection' in obj:
        raw = obj['projection']
        if isinstance(raw, dict):
            n = math.isqrt(io.decode_matrix(raw, field).rows)
        elif raw:
            n = io.decode_matrix(raw[0]['left'], field).rows
        else:
            raise ValidationError("Projection needs at least one tensor term")
        action = _action_for(args, field, n)
        projection = io.decode_projection(obj, action)
        mapping = relation_of_complement if args.complement else relation_of_projection
        return _relation_payload(mapping(action, projection))
    relation = _quantum_relation(args.input, args, field)
    ideal = ideal_of_relation(relation)
    form = projection_form(ideal)
    return {
        'dim': relation.dim,
        'ideal_dim': ideal.dim,
        'projection_rank': relation.n * relation.n - ideal.joint_kernel().dim,
        'projection': io.encode_matrix(form.matrix),
        'element': io.encode_element(form.element)
    }


def cmd_separate(args, field: ScalarField) -> Dict[str, Any]:
    relation = _quantum_relation(args.relation, args, field)
    operators = io.decode_matrices(io.load_file(args.operator), field)
    if len(operators) != 1:
        raise ValidationError("Exactly one operator is separated at a time",
                              witness=len(operators))
    witness = separate(relation, operators[0])
    if witness is None:
        return {'member': True}
    payload = io.encode_witness(witness)
    payload['member'] = False
    return payload


def cmd_reflexive(args, field: ScalarField) -> Dict[str, Any]:
    sampler = args.config.get_reflexivity_config()
    obj = io.load_file(args.input)
    matrices = io.decode_matrices(obj, field)
    n = _size_of(obj, matrices)
    space = OperatorSubspace.canonicalize(matrices, n, field)
    if args.tensor is not None:
        limit = sampler['max_amplification']
        if args.tensor > limit:
            raise GuardExceededError(f"Tensor multiplicity limited to {limit}",
                                     witness={'requested': args.tensor})
        degree, report = tensor_identity_report(space, args.tensor, args.samples, args.seed)
        payload = io.encode_report(report)
        payload['tensor_degree'] = degree
    else:
        payload = io.encode_report(reflexive_closure(space, args.samples, args.seed))
    payload['n'] = n
    if args.masa:
        payload['masa_relative'] = is_relatively_reflexive(space, sampler['guard'])
        payload['masa_closure'] = io.encode_space(masa_relative_closure(space, sampler['guard']))
    return payload


def _torus_payload(operator: qt.TorusOperator) -> Dict[str, Any]:
    return {'diagonals': len(operator.diagonals), 'operator': io.encode_torus(operator)}


def cmd_torus_fourier(args, field: ScalarField) -> Dict[str, Any]:
    operator = io.decode_torus(io.load_file(args.input))
    return _torus_payload(qt.fourier_term(operator, args.k, args.l))


def cmd_torus_cesaro(args, field: ScalarField) -> Dict[str, Any]:
    torus = args.config.get_torus_config()
    operator = io.decode_torus(io.load_file(args.input))
    mean = qt.cesaro(operator, args.order)
    payload = _torus_payload(mean)
    payload['order'] = args.order
    if args.norm:
        window = io.parse_window(args.window)
        options = {'tolerance': torus['tolerance'], 'max_iterations': torus['max_iterations'],
                   'seed': args.seed}
        payload['window_norm'] = qt.window_norm(mean, window, **options)
        payload['source_norm'] = qt.window_norm(operator, window, **options)
    return payload


def cmd_torus_check(args, field: ScalarField) -> Dict[str, Any]:
    operators = io.decode_torus_list(io.load_file(args.input))
    payload = {
        'in_torus_algebra': all(qt.in_torus_algebra(a) for a in operators),
        'in_conjugate_algebra': all(qt.in_conjugate_algebra(a) for a in operators)
    }
    if args.space:
        space = io.decode_trans_inv(io.load_file(args.space), args.config.TORUS_TOLERANCE)
        report = qt.is_translation_invariant_relation(operators, space)
        payload.update(report.to_dict())
    return payload


def _subset(text: str) -> frozenset:
    try:
        return frozenset(int(x) for x in text.split(',') if x.strip())
    except ValueError as exc:
        raise ValidationError("Subsets are comma-separated atom indices", witness=text) from exc


def cmd_metric_lipschitz(args, field: ScalarField) -> Dict[str, Any]:
    metric = io.decode_pseudometric(io.load_file(args.metric))
    payload = {}
    if args.values:
        values = io.decode_values(io.load_file(args.values), field)
        payload['lipschitz'] = io.encode_distance(fr.lipschitz(metric, values))
    if args.target is not None:
        distances = fr.distance_function(metric, _subset(args.target), args.cap)
        payload['distance_function'] = [io.encode_distance(v) for v in distances]
        payload['distance_lipschitz'] = io.encode_distance(fr.lipschitz(metric, distances))
    if not payload:
        raise ValidationError("Give function values, a --target subset, or both")
    return payload


COMMANDS: Dict[str, Any] = {
    'commutant': (cmd_commutant, "Commutant M' of an algebra (generators or shorthand)"),
    'generate-algebra': (cmd_generate_algebra, "Unital *-algebra generated by matrices"),
    'generate-relation': (cmd_generate_relation, "Bimodule over M' generated by matrices"),
    'classify': (cmd_classify, "Reflexive/symmetric/antisymmetric/transitive and class"),
    'product': (cmd_product, "Product of two relations"),
    'transpose': (cmd_transpose, "Transpose of a relation"),
    'from-relation': (cmd_from_relation, "Classical relation to a bimodule over the diagonal masa"),
    'to-relation': (cmd_to_relation, "Bimodule over the diagonal masa to a classical relation"),
    'lattice': (cmd_lattice, "Lattice of lower sets of a preorder"),
    'preorder': (cmd_preorder, "Preorder of a 0,1-sublattice of subsets"),
    'ideal': (cmd_ideal, "Annihilator left ideal of a quantum relation"),
    'from-ideal': (cmd_from_ideal, "Quantum relation annihilated by a left ideal"),
    'projection': (cmd_projection, "Projection generating the annihilator ideal, or its relation"),
    'separate': (cmd_separate, "Separate an operator from a quantum relation"),
    'reflexive': (cmd_reflexive, "Sampled reflexive closure of a subspace"),
    'torus-fourier': (cmd_torus_fourier, "Fourier term of a quantum torus operator"),
    'torus-cesaro': (cmd_torus_cesaro, "Cesaro mean of a quantum torus operator"),
    'torus-check': (cmd_torus_check, "Torus algebra, commutant and translation invariance checks"),
    'metric-lipschitz': (cmd_metric_lipschitz, "Lipschitz number for a finite pseudometric"),
}


def build_parser(cfg) -> argparse.ArgumentParser:
    scalar = cfg.get_scalar_config()
    sampler = cfg.get_reflexivity_config()
    parser = argparse.ArgumentParser(
        prog='qrel',
        description='Quantum Relations Toolkit',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG
    )

    common = argparse.ArgumentParser(add_help=False)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument('--exact', dest='mode', action='store_const', const='exact',
                      help='Exact Gaussian-rational scalars')
    mode.add_argument('--float', dest='mode', action='store_const', const='float',
                      help='Complex double scalars with --tol')
    common.add_argument('--tol', type=float, default=scalar['tolerance'],
                        help=f"Float-mode zero threshold (default: {scalar['tolerance']})")
    common.add_argument('--seed', type=int, default=sampler['seed'],
                        help=f"Sampler seed (default: {sampler['seed']})")
    common.add_argument('--samples', type=int, default=sampler['samples'],
                        help=f"Random vectors for reflexivity (default: {sampler['samples']})")
    common.add_argument('--format', choices=['json', 'summary', 'both'], default='json',
                        help='Output format (default: json)')
    common.add_argument('--output', '-o', type=str,
                        help='Write the JSON result to this file')
    common.add_argument('--quiet', '-q', action='store_true',
                        help='Quiet mode - JSON only')
    common.add_argument('--lang', '-l', type=str, default=cfg.DEFAULT_LOCALE,
                        help='Summary language (en, es, fr, zh, auto)')
    common.add_argument('--algebra', '-a', type=str,
                        help='Ambient algebra JSON (default: diagonal masa)')
    common.set_defaults(mode=scalar['mode'])

    verbs = parser.add_subparsers(dest='verb', required=True, metavar='verb')

    def verb(name: str) -> argparse.ArgumentParser:
        handler, help_text = COMMANDS[name]
        sub = verbs.add_parser(name, parents=[common], help=help_text, description=help_text)
        sub.set_defaults(handler=handler)
        return sub

    for name in ('commutant', 'generate-algebra', 'generate-relation', 'classify', 'transpose',
                 'from-relation', 'to-relation', 'lattice', 'preorder', 'ideal', 'from-ideal'):
        verb(name).add_argument('input', help='Input JSON file')

    sub = verb('product')
    sub.add_argument('left')
    sub.add_argument('right')

    sub = verb('projection')
    sub.add_argument('input', help='Relation JSON, or {"projection": ...} to read a relation back')
    sub.add_argument('--complement', action='store_true',
                     help='Use the order-preserving map P -> relation of (1 - P)')

    sub = verb('separate')
    sub.add_argument('relation')
    sub.add_argument('operator')

    sub = verb('reflexive')
    sub.add_argument('input', help='Subspace generators')
    sub.add_argument('--masa', action='store_true',
                     help='Also compute the closure over diagonal projection pairs')
    sub.add_argument('--tensor', type=int,
                     help='Check V (x) I_d instead (d raised to at least n)')

    sub = verb('torus-fourier')
    sub.add_argument('input')
    sub.add_argument('--k', type=int, default=0)
    sub.add_argument('--l', type=int, default=0)

    sub = verb('torus-cesaro')
    sub.add_argument('input')
    sub.add_argument('--order', '-N', type=int, required=True)
    sub.add_argument('--norm', action='store_true',
                     help='Also report operator norms (finitely supported coefficients only)')
    sub.add_argument('--window', type=str, help='m0,m1,n0,n1 box for the norm')

    sub = verb('torus-check')
    sub.add_argument('input', help='One operator or a list of generators')
    sub.add_argument('--space', type=str, help='Translation-invariant coefficient space JSON')

    sub = verb('metric-lipschitz')
    sub.add_argument('metric')
    sub.add_argument('values', nargs='?')
    sub.add_argument('--target', type=str, help='Comma-separated atoms for the distance function')
    sub.add_argument('--cap', type=str, default='1', help='Distance function cap (default: 1)')

    return parser


def _display(value: Any) -> str:
    if isinstance(value, bool):
        return i18n.t('values.true' if value else 'values.false')
    if value is None:
        return i18n.t('values.none')
    return str(value)


def print_results_summary(result: Dict[str, Any], locale: str = 'en'):
    """Print a formatted summary of results"""
    i18n.set_locale(locale)

    print("=" * 60)
    print(f"📊 {i18n.t('cli.summary_title', verb=result['verb'])}")
    print("=" * 60)

    for key in sorted(result):
        value = result[key]
        if isinstance(value, (dict, list)):
            continue
        label = i18n.lookup(f'labels.{key}') or key
        print(f"   {label}: {_display(value)}")

    print("-" * 60)


def _emit(payload: Dict[str, Any], args, locale: str):
    text = io.dumps(payload)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding='utf-8')
        if not args.quiet:
            print(f"💾 {i18n.t('cli.saved')}: {args.output}")
    elif args.format in ('json', 'both') or args.quiet:
        print(text)

    if args.format in ('summary', 'both') and not args.quiet:
        print(f"🚀 {i18n.t('cli.title')}")
        print(f"   {i18n.t('cli.subtitle')}")
        print_results_summary(payload, locale)


def _fail(payload: Dict[str, Any], code: int) -> int:
    print(io.dumps(payload))
    return code


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch one verb and return the exit code"""
    cfg = get_config()
    parser = build_parser(cfg)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    args.config = cfg
    problems = cfg.validate_config()
    if problems:
        error = ConfigError("Invalid configuration", witness={'problems': problems})
        return _fail(error.to_dict(), 2)

    locale = resolve_locale(args.lang, cfg.DEFAULT_LOCALE)
    i18n.set_locale(locale)

    try:
        field = field_for(args.mode, args.tol)
        result = args.handler(args, field)
    except ParseError as exc:
        return _fail(exc.to_dict(), 4)
    except FileNotFoundError as exc:
        return _fail({'error': 'FileNotFoundError', 'message': str(exc),
                      'path': exc.filename}, 3)
    except ValidationError as exc:
        return _fail(exc.to_dict(), 2)
    except QRelError as exc:
        return _fail({'error': type(exc).__name__, 'message': str(exc)}, 2)
    except Exception as exc:
        logger.exception("unexpected failure in %s", args.verb)
        return _fail({'error': type(exc).__name__, 'message': str(exc)}, 1)

    payload = {'verb': args.verb, 'mode': field.mode}
    payload.update(result)
    _emit(payload, args, locale)
    return 0


def main():
    get_config().configure_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
