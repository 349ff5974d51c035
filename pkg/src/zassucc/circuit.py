"""Abstract Givens-gate circuits over one-hot block registers.

Each 2D block owns three qubits (p, q, pq) encoding which pair creation
populated it; the q qubit is never touched by an emitted gate. A B-factor
becomes a 2-qubit Givens rotation on (p, pq), an A-factor a 4-qubit Givens
rotation on (p_i, pq_i, p_j, pq_j). Gate sign conventions are pinned by the
calibration tests against the restricted-representation exponentials, not
assumed here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .decomposition import DecompositionPlan
from .oracle import RestrictedRep


@dataclass(frozen=True)
class BlockRegisterLayout:
    """Qubit assignment per block: (p_i, q_i, pq_i) triples plus optional
    inert frozen qubits."""

    triples: tuple  # ((p, q, pq), ...) per block
    frozen: tuple = ()

    @classmethod
    def default(cls, n: int, n_frozen: int = 0) -> "BlockRegisterLayout":
        triples = tuple((3 * b, 3 * b + 1, 3 * b + 2) for b in range(n))
        frozen = tuple(3 * n + f for f in range(n_frozen))
        return cls(triples=triples, frozen=frozen)

    @property
    def n(self) -> int:
        return len(self.triples)

    @property
    def n_qubits(self) -> int:
        return max([q for t in self.triples for q in t] + list(self.frozen)) + 1

    def p(self, block: int) -> int:
        return self.triples[block - 1][0]

    def q(self, block: int) -> int:
        return self.triples[block - 1][1]

    def pq(self, block: int) -> int:
        return self.triples[block - 1][2]


@dataclass(frozen=True)
class Gate:
    kind: str          # "givens2" | "givens4"
    qubits: tuple
    theta: float
    source: tuple      # ("A", i, j) or ("B", k)

    def to_dict(self) -> dict:
        if self.source[0] == "A":
            d = {"gen": "A", "i": self.source[1], "j": self.source[2]}
        else:
            d = {"gen": "B", "k": self.source[1]}
        d["angle"] = self.theta
        d["qubits"] = list(self.qubits)
        return d


@dataclass(frozen=True)
class CircuitIR:
    gates: tuple

    def to_json(self, **kwargs) -> str:
        return json.dumps({"gates": [g.to_dict() for g in self.gates]}, **kwargs)


def emit(plan: DecompositionPlan, layout: BlockRegisterLayout, prune: bool = False) -> CircuitIR:
    """Translate plan factors to Givens gates, order preserved; zero-angle
    factors stay in the circuit unless prune is set."""
    if plan.n > layout.n:
        raise ValueError(f"plan has {plan.n} blocks but layout only {layout.n}")
    gates = []
    for gen, angle in plan.factors:
        if prune and angle == 0.0:
            continue
        if gen[0] == "A":
            i, j = gen[1], gen[2]
            gates.append(Gate("givens4",
                              (layout.p(i), layout.pq(i), layout.p(j), layout.pq(j)),
                              angle, gen))
        else:
            k = gen[1]
            gates.append(Gate("givens2", (layout.p(k), layout.pq(k)), angle, gen))
    return CircuitIR(gates=tuple(gates))


def _basis_bitstrings(layout: BlockRegisterLayout, n_blocks: int):
    """One-hot encodings of the restricted basis: block k in state P sets
    its p qubit, in state O its pq qubit; frozen qubits stay set."""
    base = 0
    for f in layout.frozen:
        base |= 1 << f
    strings = []
    for s in range(1 << n_blocks):
        bits = base
        for k in range(1, n_blocks + 1):
            if (s >> (k - 1)) & 1:
                bits |= 1 << layout.pq(k)
            else:
                bits |= 1 << layout.p(k)
        strings.append(bits)
    return strings


def _gate_matrix(gate: Gate, strings, index):
    """Two-level rotation of the gate on the encoded basis."""
    c, s = np.cos(gate.theta), np.sin(gate.theta)
    if gate.kind == "givens2":
        a, b = gate.qubits
        hi, lo = (1 << a), (1 << b)
        pattern = lambda bits: (bool(bits & hi), bool(bits & lo))
        src, dst = (True, False), (False, True)
        flip = hi | lo
    else:
        a, b, cq, d = gate.qubits
        masks = (1 << a, 1 << b, 1 << cq, 1 << d)
        pattern = lambda bits: tuple(bool(bits & m) for m in masks)
        src, dst = (True, False, True, False), (False, True, False, True)
        flip = masks[0] | masks[1] | masks[2] | masks[3]
    rot = np.eye(len(strings))
    for row, bits in enumerate(strings):
        pat = pattern(bits)
        if pat == src:
            partner = index[bits ^ flip]
            rot[row, row] = c
            rot[partner, row] = s
        elif pat == dst:
            partner = index[bits ^ flip]
            rot[row, row] = c
            rot[partner, row] = -s
    return rot


def simulate(circuit: CircuitIR, layout: BlockRegisterLayout,
             n_blocks: int | None = None) -> np.ndarray:
    """Unitary of the circuit on the 2^N one-hot-encoded restricted basis.

    Givens2(theta) maps |10> -> cos|10> + sin|01> on its qubit pair and
    Givens4(theta) rotates |1010> <-> |0101> analogously; gates act
    block-diagonally, so the one-hot subspace maps to itself exactly.
    """
    n = layout.n if n_blocks is None else n_blocks
    strings = _basis_bitstrings(layout, n)
    index = {bits: pos for pos, bits in enumerate(strings)}
    # factor order matches the plan product: the first gate is the leftmost
    # matrix factor
    U = np.eye(1 << n)
    for gate in circuit.gates:
        U = U @ _gate_matrix(gate, strings, index)
    return U


def export_text(circuit: CircuitIR, sign_flip: bool = False) -> str:
    """One gate per line: `givens2 q[a],q[b] theta=<17-sig-digit decimal>`;
    sign_flip negates every angle in the output only."""
    lines = []
    for gate in circuit.gates:
        theta = -gate.theta if sign_flip else gate.theta
        qubits = ",".join(f"q[{q}]" for q in gate.qubits)
        lines.append(f"{gate.kind} {qubits} theta={theta:.17g}")
    return "".join(line + "\n" for line in lines)


def circuit_residual(plan: DecompositionPlan, params, layout=None) -> float:
    """Frobenius distance between the simulated circuit and
    exp(X_r + Y_r) on the restricted representation."""
    from ._kernels import expm_dense

    rep = RestrictedRep(params.n)
    if layout is None:
        layout = BlockRegisterLayout.default(params.n)
    U = simulate(emit(plan, layout), layout, n_blocks=params.n)
    target = expm_dense(rep.X_r(params) + rep.Y_r(params))
    return float(np.linalg.norm(U - target, "fro"))
