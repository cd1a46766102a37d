"""
JSON codecs for matrices, relations, lattices, pseudometrics, ideals and torus operators
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from core.errors import ParseError, ShapeMismatchError, ValidationError
from core.finite_relations import (INF, FinPseudometric, FinSet, FiniteRelation,
                                   SubsetLattice)
from core.intrinsic import BimoduleAction, LeftIdeal, SeparationWitness, TensorElement
from core.matrix import Matrix
from core.quantum_torus import (CoefficientFunction, Hbar, TorusOperator,
                                TransInvSubspace)
from core.reflexivity import ReflexivityReport
from core.scalars import EXACT, ScalarField
from core.subspace import OperatorSubspace
from core.vn_algebra import (VonNeumannAlgebra, block_algebra, diagonal_masa,
                             full_algebra, generate_algebra, scalar_algebra)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc


def load_file(path: str) -> Any:
    """Read and parse a JSON file; a missing file raises FileNotFoundError"""
    return loads(Path(path).read_text(encoding='utf-8'))


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def _require(obj: Any, key: str, kind: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{kind} object needs a '{key}' field")
    return obj[key]


# Matrices and operator subspaces

def encode_matrix(matrix: Matrix) -> Dict[str, Any]:
    field = matrix.field
    return {
        'rows': matrix.rows,
        'cols': matrix.cols,
        'entries': [field.encode(x) for x in matrix.entries]
    }


def decode_matrix(obj: Any, field: ScalarField = EXACT) -> Matrix:
    rows = _require(obj, 'rows', 'Matrix')
    cols = _require(obj, 'cols', 'Matrix')
    entries = _require(obj, 'entries', 'Matrix')
    if not isinstance(rows, int) or not isinstance(cols, int) or not isinstance(entries, list):
        raise ParseError("Matrix needs integer 'rows', 'cols' and an 'entries' list")
    if len(entries) != rows * cols:
        raise ShapeMismatchError(f"Matrix declares {rows}x{cols} but has {len(entries)} entries",
                                 witness={'rows': rows, 'cols': cols, 'entries': len(entries)})
    return Matrix(rows, cols, tuple(field.decode(x) for x in entries), field)


def decode_matrices(obj: Any, field: ScalarField = EXACT) -> List[Matrix]:
    """A list of matrices, or an object holding one under generators/basis/matrices"""
    if isinstance(obj, dict):
        for key in ('generators', 'basis', 'matrices'):
            if key in obj:
                return decode_matrices(obj[key], field)
        if 'relation' in obj:
            return decode_matrices(obj['relation'], field)
        if 'rows' in obj:
            return [decode_matrix(obj, field)]
        raise ParseError("Expected a matrix list or an object with 'generators' or 'basis'")
    if not isinstance(obj, list):
        raise ParseError("Expected a list of matrices")
    return [decode_matrix(item, field) for item in obj]


def matrix_size(obj: Any) -> Optional[int]:
    """Declared n of an encoded subspace, when present"""
    if isinstance(obj, dict):
        if isinstance(obj.get('n'), int):
            return obj['n']
        if isinstance(obj.get('relation'), dict):
            return matrix_size(obj['relation'])
    return None


def encode_space(space: OperatorSubspace) -> Dict[str, Any]:
    return {'n': space.n, 'dim': space.dim, 'basis': [encode_matrix(m) for m in space.basis()]}


# Algebras

def decode_algebra(obj: Any, field: ScalarField = EXACT) -> VonNeumannAlgebra:
    """Shorthand {"kind": diagonal|full|scalar|blocks, ...} or a generator list"""
    if isinstance(obj, dict) and 'kind' in obj:
        kind = obj['kind']
        if kind == 'blocks':
            sizes = _require(obj, 'sizes', 'Block algebra')
            return block_algebra(sizes, field)
        n = _require(obj, 'n', 'Algebra')
        if not isinstance(n, int) or n < 1:
            raise ValidationError("Algebra size must be a positive integer", witness=n)
        constructors = {'diagonal': diagonal_masa, 'full': full_algebra, 'scalar': scalar_algebra}
        if kind not in constructors:
            raise ParseError(f"Unknown algebra kind: {kind!r}")
        return constructors[kind](n, field)
    generators = decode_matrices(obj, field)
    return generate_algebra(generators, matrix_size(obj), field)


# Classical relations, lattices, pseudometrics

def decode_finset(obj: Any) -> FinSet:
    atoms = _require(obj, 'atoms', 'Relation')
    if isinstance(atoms, int):
        atoms = [str(i) for i in range(atoms)]
    weights = obj.get('weights') or ()
    return FinSet(tuple(str(a) for a in atoms), tuple(_fraction(w) for w in weights))


def encode_finset(base: FinSet) -> Dict[str, Any]:
    return {'atoms': list(base.labels), 'weights': [str(w) for w in base.weights]}


def decode_relation(obj: Any) -> FiniteRelation:
    base = decode_finset(obj)
    pairs = _require(obj, 'pairs', 'Relation')
    try:
        return FiniteRelation(base, frozenset((int(x), int(y)) for x, y in pairs))
    except (TypeError, ValueError) as exc:
        raise ParseError("Relation pairs must be [i, j] index pairs") from exc


def encode_relation(relation: FiniteRelation) -> Dict[str, Any]:
    payload = encode_finset(relation.base)
    payload['pairs'] = relation.sorted_pairs()
    return payload


def decode_lattice(obj: Any) -> SubsetLattice:
    base = decode_finset(obj)
    members = _require(obj, 'members', 'Lattice')
    return SubsetLattice(base, frozenset(frozenset(int(x) for x in m) for m in members))


def encode_lattice(lattice: SubsetLattice) -> Dict[str, Any]:
    payload = encode_finset(lattice.base)
    payload['members'] = lattice.sorted_members()
    payload['boolean'] = lattice.is_boolean
    return payload


def encode_distance(value: Any) -> Any:
    if value == INF:
        return 'inf'
    if isinstance(value, Fraction):
        return str(value)
    return value


def decode_pseudometric(obj: Any) -> FinPseudometric:
    base = decode_finset(obj)
    table = _require(obj, 'd', 'Pseudometric')
    rows = tuple(tuple(v if v == 'inf' or isinstance(v, (int, float)) else _fraction(v)
                       for v in row) for row in table)
    return FinPseudometric(base, rows)


def decode_values(obj: Any, field: ScalarField = EXACT) -> List[Any]:
    values = obj.get('values') if isinstance(obj, dict) else obj
    if not isinstance(values, list):
        raise ParseError("Function values must be a list")
    decoded = [field.decode(v) for v in values]
    if field.is_exact() and all(v.im == 0 for v in decoded):
        return [v.re for v in decoded]
    return decoded


# Ideals, projections, separation

def encode_element(element: TensorElement) -> List[Dict[str, Any]]:
    return [{'left': encode_matrix(a), 'right': encode_matrix(c)} for a, c in element.terms]


def decode_element(obj: Any, field: ScalarField = EXACT) -> TensorElement:
    if not isinstance(obj, list):
        raise ParseError("Tensor element must be a list of {left, right} pairs")
    terms = []
    for term in obj:
        left = decode_matrix(_require(term, 'left', 'Tensor term'), field)
        right = decode_matrix(_require(term, 'right', 'Tensor term'), field)
        terms.append((left, right))
    return TensorElement(tuple(terms))


def encode_ideal(ideal: LeftIdeal) -> Dict[str, Any]:
    return {'dim': ideal.dim, 'elements': [encode_element(e) for e in ideal.elements()]}


def decode_ideal_elements(obj: Any, field: ScalarField = EXACT) -> List[TensorElement]:
    if isinstance(obj, dict) and 'ideal' in obj:
        obj = obj['ideal']
    elements = _require(obj, 'elements', 'Ideal')
    return [decode_element(e, field) for e in elements]


def decode_projection(obj: Any, action: BimoduleAction) -> Any:
    """Either a represented n^2 x n^2 matrix or a list of {left, right} pairs"""
    if isinstance(obj, dict) and 'projection' in obj:
        obj = obj['projection']
    if isinstance(obj, dict) and 'rows' in obj:
        return decode_matrix(obj, action.field)
    return decode_element(obj, action.field)


def encode_witness(witness: SeparationWitness) -> Dict[str, Any]:
    field = witness.operator.field
    return {
        'degree': witness.degree,
        'left': encode_matrix(witness.left),
        'right': encode_matrix(witness.right),
        'operator': encode_matrix(witness.operator),
        'functional': encode_matrix(witness.functional),
        'left_vector': [field.encode(x) for x in witness.left_vector],
        'right_vector': [field.encode(x) for x in witness.right_vector]
    }


def encode_report(report: ReflexivityReport) -> Dict[str, Any]:
    return {
        'dim': report.space.dim,
        'closure': encode_space(report.closure),
        'closure_dim': report.closure.dim,
        'is_reflexive': report.is_reflexive,
        'certificate': None if report.certificate is None else encode_matrix(report.certificate),
        'samples_used': report.samples_used,
        'stabilized': report.stabilized,
        'validated': report.validated,
        'seed': report.seed,
        'exactness': 'probabilistic'
    }


# Quantum torus

def _fraction(value: Any) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"Not a rational literal: {value!r}") from exc


def _complex(pair: Any) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ParseError(f"Complex value must be [re, im], got {pair!r}")
    return complex(float(_fraction(pair[0]) if isinstance(pair[0], str) else pair[0]),
                   float(_fraction(pair[1]) if isinstance(pair[1], str) else pair[1]))


def decode_hbar(obj: Any) -> Hbar:
    num = _require(obj, 'num', 'hbar')
    den = obj.get('den', 1)
    if den == 0:
        raise ValidationError("hbar denominator must be nonzero")
    return Hbar(Fraction(int(num), int(den)), bool(obj.get('times_pi', True)))


def encode_hbar(hbar: Hbar) -> Dict[str, Any]:
    return {'num': hbar.value.numerator, 'den': hbar.value.denominator, 'times_pi': hbar.times_pi}


def decode_coefficient(obj: Dict[str, Any]) -> CoefficientFunction:
    waves = {}
    if 'const' in obj:
        waves[(Fraction(0), Fraction(0))] = _complex(obj['const'])
    for wave in obj.get('waves', []):
        freq = (_fraction(_require(wave, 'x', 'Wave')), _fraction(_require(wave, 'y', 'Wave')))
        waves[freq] = waves.get(freq, 0j) + _complex(_require(wave, 'value', 'Wave'))
    table = {}
    for row in obj.get('table', []):
        if len(row) != 4:
            raise ParseError(f"Table rows are [m, n, re, im], got {row!r}")
        m, n, re, im = row
        table[(int(m), int(n))] = _complex([re, im])
    return CoefficientFunction.build(waves, table)


def encode_coefficient(f: CoefficientFunction) -> Dict[str, Any]:
    waves = f.wave_map
    const = waves.pop((Fraction(0), Fraction(0)), 0j)
    payload = {
        'const': [const.real, const.imag],
        'table': [[m, n, v.real, v.imag] for (m, n), v in f.table]
    }
    if waves:
        payload['waves'] = [{'x': str(x), 'y': str(y), 'value': [v.real, v.imag]}
                            for (x, y), v in sorted(waves.items())]
    return payload


def decode_torus(obj: Any) -> TorusOperator:
    hbar = decode_hbar(_require(obj, 'hbar', 'Torus operator'))
    diagonals: Dict[Any, CoefficientFunction] = {}
    for diagonal in _require(obj, 'diagonals', 'Torus operator'):
        index = (int(_require(diagonal, 'k', 'Diagonal')), int(_require(diagonal, 'l', 'Diagonal')))
        f = decode_coefficient(diagonal)
        diagonals[index] = diagonals[index].add(f) if index in diagonals else f
    return TorusOperator.build(hbar, diagonals)


def decode_torus_list(obj: Any) -> List[TorusOperator]:
    if isinstance(obj, dict) and 'operators' in obj:
        obj = obj['operators']
    if isinstance(obj, list):
        return [decode_torus(item) for item in obj]
    return [decode_torus(obj)]


def encode_torus(operator: TorusOperator) -> Dict[str, Any]:
    diagonals = []
    for (k, l), f in operator.diagonals:
        entry = {'k': k, 'l': l}
        entry.update(encode_coefficient(f))
        diagonals.append(entry)
    return {'hbar': encode_hbar(operator.hbar), 'diagonals': diagonals}


def decode_trans_inv(obj: Any, tolerance: float = 1e-9) -> TransInvSubspace:
    frequencies = frozenset((_fraction(x), _fraction(y)) for x, y in obj.get('frequencies', []))
    generators = []
    for table in obj.get('generators', []):
        rows = tuple(((int(m), int(n)), _complex([re, im])) for m, n, re, im in table)
        generators.append(tuple(sorted(rows)))
    return TransInvSubspace(frequencies, tuple(generators), bool(obj.get('all_finite', False)),
                            bool(obj.get('everything', False)), tolerance)


def parse_window(text: Optional[str]) -> Optional[Sequence[int]]:
    """'m0,m1,n0,n1' to a window box"""
    if text is None:
        return None
    parts = text.split(',')
    if len(parts) != 4:
        raise ValidationError("Window must be m0,m1,n0,n1", witness=text)
    try:
        window = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise ValidationError("Window bounds must be integers", witness=text) from exc
    if window[0] > window[1] or window[2] > window[3]:
        raise ValidationError("Window bounds are reversed", witness=text)
    return window
