"""Projected-subspace decomposition of commutator dynamics.

The free Hamiltonian's eigen-dyads |f_i><f_j| span a complete set of rank-1
Liouville projectors P_nu, nu = (i, j). For each nu the engine builds a
creation operator C_nu = Q_nu C_nu P_nu (how the exact eigenvector leaks out
of the dyad), a destruction operator D_nu = P_nu D_nu Q_nu (its left
counterpart), the kinetic eigenvalue E_nu, and the total projector Pi_nu.
Collecting the nu columns gives the similarity Omega = I + C with
L Omega = Omega Theta, Theta = diag(E_nu).

All superoperators here are expressed in the frame of the free eigenbasis
(the "phi frame"), where L0 is diagonal; states convert via rho_f = F^dag
rho F. Three construction orders are supported: "exact" (from the full
eigendecomposition of H), and the stationary-resolvent perturbation series
truncated at first ("1") or second ("2") order in lam.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.optimize

from .linalg import (
    DEFAULT_TOL,
    DEGENERACY_TOL,
    DefectiveMatrixError,
    NonHermitianError,
    as_complex_matrix,
    commutator_superop,
    eig,
    expm_action,
    is_hermitian,
    norm_scale,
    unvec,
    vec,
)

ORDERS = ("exact", "1", "2")


class ResonanceError(ValueError):
    """Degenerate free eigenvalues coupled by the interaction at eta = 0."""

    def __init__(self, pairs: list[tuple["NuIndex", "NuIndex"]]):
        self.pairs = pairs
        shown = ", ".join(f"{a.as_tuple()}<->{b.as_tuple()}" for a, b in pairs[:4])
        more = "" if len(pairs) <= 4 else f" (+{len(pairs) - 4} more)"
        super().__init__(
            f"resonant nu pairs with coupled degenerate free eigenvalues: {shown}{more}; "
            "set eta > 0 to regularize")


@dataclasses.dataclass(frozen=True)
class NuIndex:
    """Dyad label nu = (i, j) for |f_i><f_j|, indices into the sorted basis."""

    row: int
    col: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.row, self.col)

    @property
    def is_population(self) -> bool:
        return self.row == self.col


@dataclasses.dataclass(frozen=True)
class PhiBasis:
    """Free eigenframe: H0 eigenpairs and the induced Liouville dyad grid.

    f_values are sorted ascending; the dyad nu = (i, j) sits at Liouville
    index i + dim * j (column stacking), listed in nu_indices.
    """

    f_values: np.ndarray
    f_vectors: np.ndarray
    e0: np.ndarray
    nu_indices: tuple[NuIndex, ...]

    @property
    def dim(self) -> int:
        return self.f_values.shape[0]

    @property
    def dim2(self) -> int:
        return self.e0.shape[0]

    def liouville_index(self, nu: NuIndex) -> int:
        return nu.row + self.dim * nu.col

    def to_frame(self, rho: np.ndarray) -> np.ndarray:
        """Density matrix -> Liouville vector in the free eigenframe."""
        f = self.f_vectors
        return vec(f.conj().T @ as_complex_matrix(rho, "rho") @ f)

    def from_frame(self, rho_vec: np.ndarray) -> np.ndarray:
        """Liouville vector in the free eigenframe -> density matrix."""
        f = self.f_vectors
        return f @ unvec(rho_vec, self.dim) @ f.conj().T

    def dyad_matrix(self, nu: NuIndex) -> np.ndarray:
        """|f_i><f_j| as a dense matrix in the original frame."""
        return np.outer(self.f_vectors[:, nu.row], self.f_vectors[:, nu.col].conj())


def liouville_basis(h0, tol: float = DEFAULT_TOL) -> PhiBasis:
    """Diagonalize a Hermitian free Hamiltonian into the dyad frame."""
    h = as_complex_matrix(h0, "h0")
    if not is_hermitian(h, tol):
        raise NonHermitianError("free Hamiltonian must be Hermitian")
    system = eig(h, hermitian=True, tol=tol)
    eps = system.values.real
    d = eps.shape[0]
    e0 = vec(np.subtract.outer(eps, eps)).astype(np.complex128)
    nus = tuple(NuIndex(i, j) for j in range(d) for i in range(d))
    return PhiBasis(f_values=eps, f_vectors=system.right_vectors, e0=e0, nu_indices=nus)


@dataclasses.dataclass(frozen=True)
class SubdynDecomposition:
    """Per-nu bundle of projected-subspace operators.

    Matrices are materialized in the phi frame on demand; the compact state
    lives in the parent Decomposition (one column/row per nu).
    """

    nu: NuIndex
    index: int
    order: str
    e0: complex
    energy: complex
    parent: "Decomposition"

    @property
    def P(self) -> np.ndarray:
        n = self.parent.basis.dim2
        out = np.zeros((n, n), dtype=np.complex128)
        out[self.index, self.index] = 1.0
        return out

    @property
    def Q(self) -> np.ndarray:
        out = np.eye(self.parent.basis.dim2, dtype=np.complex128)
        out[self.index, self.index] = 0.0
        return out

    @property
    def C(self) -> np.ndarray:
        n = self.parent.basis.dim2
        out = np.zeros((n, n), dtype=np.complex128)
        out[:, self.index] = self.parent.c_cols[:, self.index]
        return out

    @property
    def D(self) -> np.ndarray:
        n = self.parent.basis.dim2
        out = np.zeros((n, n), dtype=np.complex128)
        out[self.index, :] = self.parent.d_rows[self.index, :]
        return out

    @property
    def Pi(self) -> np.ndarray:
        return self.parent.total_projector(self.nu)


@dataclasses.dataclass(frozen=True)
class Decomposition:
    """Complete projected-subspace decomposition at one construction order.

    c_cols stacks the creation columns (C = sum_nu c_nu e_nu^T), d_rows the
    destruction rows, energies the kinetic eigenvalues E_nu. All entries are
    phi-frame quantities.
    """

    basis: PhiBasis
    order: str
    lam: float
    eta: float
    h1_f: np.ndarray
    v1: np.ndarray
    c_cols: np.ndarray
    d_rows: np.ndarray
    energies: np.ndarray

    @property
    def dim2(self) -> int:
        return self.basis.dim2

    def liouvillian(self) -> np.ndarray:
        """Full phi-frame Liouvillian diag(E0) + lam * L1."""
        return np.diag(self.basis.e0) + self.lam * self.v1

    def bundle(self, nu: NuIndex) -> SubdynDecomposition:
        k = self.basis.liouville_index(nu)
        return SubdynDecomposition(nu=nu, index=k, order=self.order,
                                   e0=complex(self.basis.e0[k]),
                                   energy=complex(self.energies[k]), parent=self)

    def bundles(self) -> list[SubdynDecomposition]:
        return [self.bundle(nu) for nu in self.basis.nu_indices]

    def omega(self) -> np.ndarray:
        """Similarity operator Omega = sum_nu (P_nu + C_nu) = I + C."""
        return np.eye(self.dim2, dtype=np.complex128) + self.c_cols

    def theta_matrix(self) -> np.ndarray:
        """Intermediate operator, diagonal in the phi frame."""
        return np.diag(self.energies)

    def pairing(self) -> np.ndarray:
        """kappa_nu = 1 + d_nu . c_nu, the (P + DC) scale on each P block."""
        return 1.0 + np.einsum("ij,ji->i", self.d_rows, self.c_cols)

    def total_projector(self, nu: NuIndex) -> np.ndarray:
        """Pi_nu = (P + C)(P + DC)^-1(P + D), a rank-1 phi-frame matrix."""
        k = self.basis.liouville_index(nu)
        kappa = self.pairing()[k]
        if abs(kappa) < DEFAULT_TOL:
            raise ValueError(f"(P + DC) numerically singular on the P block of nu={nu.as_tuple()}")
        right = np.zeros(self.dim2, dtype=np.complex128)
        right[k] = 1.0
        right += self.c_cols[:, k]
        left = np.zeros(self.dim2, dtype=np.complex128)
        left[k] = 1.0
        left += self.d_rows[k, :]
        return np.outer(right, left) / kappa

    def projector_sum(self) -> np.ndarray:
        """sum_nu Pi_nu; the identity when the decomposition is complete."""
        kappa = self.pairing()
        if np.min(np.abs(kappa)) < DEFAULT_TOL:
            raise ValueError("(P + DC) numerically singular on at least one P block")
        right = np.eye(self.dim2, dtype=np.complex128) + self.c_cols
        left = np.eye(self.dim2, dtype=np.complex128) + self.d_rows
        return (right / kappa) @ left


def _degeneracy_masks(e0: np.ndarray, v1: np.ndarray, lam: float, tol: float):
    """Boolean masks for degenerate pairs and for coupled (resonant) ones."""
    scale = max(1.0, float(np.max(np.abs(e0))))
    gap = np.abs(e0[None, :] - e0[:, None])
    degenerate = gap <= tol * scale
    coupling = np.abs(lam * v1) > DEFAULT_TOL * max(1.0, float(np.linalg.norm(lam * v1)))
    off = ~np.eye(e0.shape[0], dtype=bool)
    return degenerate, degenerate & coupling & off


def _resonant_pairs(basis: PhiBasis, mask: np.ndarray) -> list[tuple[NuIndex, NuIndex]]:
    rows, cols = np.nonzero(mask)
    return [(basis.nu_indices[r], basis.nu_indices[c]) for r, c in zip(rows, cols)]


def _perturbative_columns(basis: PhiBasis, v1: np.ndarray, lam: float, eta: float,
                          order: str, tol: float = DEGENERACY_TOL):
    """Stationary-resolvent series for C (columns) and D (rows) at order 1 or 2.

    Denominators are E0_nu - E0_mu + i eta (retarded branch). Terms between
    uncoupled degenerate partners are dropped; coupled degenerate partners at
    eta = 0 raise ResonanceError.
    """
    e0 = basis.e0
    degenerate, resonant = _degeneracy_masks(e0, v1, lam, tol)
    if eta == 0.0 and resonant.any():
        raise ResonanceError(_resonant_pairs(basis, resonant))
    # delta[mu, nu] = E0_nu - E0_mu + i eta
    delta = e0[None, :] - e0[:, None] + 1j * eta
    blocked = degenerate if eta == 0.0 else np.eye(e0.shape[0], dtype=bool)
    inv = np.where(blocked, 0.0, 1.0 / np.where(blocked, 1.0, delta))
    c = lam * v1 * inv
    d = lam * v1 * inv.T
    if order == "2":
        c = c + lam * (v1 @ c) * inv
        d = d + lam * (d @ v1) * inv.T
    return c, d


def _theta_energies(basis: PhiBasis, v1: np.ndarray, lam: float, c_cols: np.ndarray) -> np.ndarray:
    """Diagonal of Theta: E_nu = E0_nu + lam*V[nu,nu] + lam*(V c)[nu,nu]."""
    return (basis.e0 + lam * np.diag(v1) + lam * np.einsum("ij,ji->i", v1, c_cols))


def _exact_columns(basis: PhiBasis, h1_f: np.ndarray, lam: float, tol: float = DEFAULT_TOL):
    """Exact C/D/E from the eigendecomposition of H in the phi frame.

    Eigenvectors are matched to the free basis by maximum-overlap assignment,
    so each nu tracks the branch continuously connected to its dyad.
    """
    d = basis.dim
    h = np.diag(basis.f_values).astype(np.complex128) + lam * h1_f
    system = eig(h, tol=tol)
    overlap = np.abs(system.right_vectors)
    rows, cols = scipy.optimize.linear_sum_assignment(-overlap)
    perm = np.empty(d, dtype=int)
    perm[rows] = cols
    psi = system.right_vectors[:, perm]
    psi_tilde = system.left_vectors[perm, :]
    z = system.values[perm]

    anchors = np.abs(np.diag(psi))
    if np.min(anchors) < 10 * tol:
        raise ValueError(
            "eigenvector branch lost its free anchor (interaction too strong "
            f"for dyad tracking; smallest overlap {np.min(anchors):.3e})")

    # Liouville right vectors w_nu = kron(psi~_j, psi_i), left rows
    # l_nu = kron(psi_j, psi~_i); both indexed by nu = i + d*j.
    w = np.kron(psi_tilde.T, psi)
    l = np.kron(psi.T, psi_tilde)
    w_diag = np.diag(w).copy()
    l_diag = np.diag(l).copy()
    c_cols = w / w_diag[None, :]
    np.fill_diagonal(c_cols, 1.0)
    c_cols -= np.eye(d * d, dtype=np.complex128)
    d_rows = l / l_diag[:, None]
    np.fill_diagonal(d_rows, 1.0)
    d_rows -= np.eye(d * d, dtype=np.complex128)
    energies = vec(np.subtract.outer(z, z)).astype(np.complex128)
    return c_cols, d_rows, energies


def normalize_order(order) -> str:
    """Accept 'exact' / 1 / '1' / 2 / '2' and return the canonical string."""
    text = str(order)
    if text not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    return text


def decompose(h0, h1, lam: float = 1.0, order="exact", eta: float = 0.0,
              tol: float = DEFAULT_TOL) -> Decomposition:
    """Build the full projected-subspace decomposition of H = H0 + lam H1."""
    order = normalize_order(order)
    basis = liouville_basis(h0, tol)
    f = basis.f_vectors
    h1_f = f.conj().T @ as_complex_matrix(h1, "h1") @ f
    v1 = commutator_superop(h1_f)
    if order == "exact":
        c_cols, d_rows, energies = _exact_columns(basis, h1_f, lam, tol)
    else:
        c_cols, d_rows = _perturbative_columns(basis, v1, lam, eta, order)
        energies = _theta_energies(basis, v1, lam, c_cols)
    return Decomposition(basis=basis, order=order, lam=lam, eta=eta, h1_f=h1_f,
                         v1=v1, c_cols=c_cols, d_rows=d_rows, energies=energies)


def decompose_model(ops, order="exact", eta: float = 0.0, lam: float | None = None,
                    tol: float = DEFAULT_TOL) -> Decomposition:
    """decompose() taking a ModelOperators, defaulting lam to ModelSpec.lam."""
    scale = ops.spec.lam if lam is None else lam
    return decompose(ops.h0, ops.h1, lam=scale, order=order, eta=eta, tol=tol)


def eigenprojectors(basis: PhiBasis) -> list[np.ndarray]:
    """Rank-1 phi-frame projectors P_nu for every ordered dyad."""
    n = basis.dim2
    out = []
    for k in range(n):
        p = np.zeros((n, n), dtype=np.complex128)
        p[k, k] = 1.0
        out.append(p)
    return out


def creation_first_order(basis: PhiBasis, v1: np.ndarray, lam: float, nu: NuIndex,
                         eta: float = 0.0) -> np.ndarray:
    """First-order creation column for one nu (phi frame)."""
    c, _ = _perturbative_columns(basis, v1, lam, eta, "1")
    return c[:, basis.liouville_index(nu)]


def destruction_second_order(basis: PhiBasis, v1: np.ndarray, lam: float, nu: NuIndex,
                             eta: float = 0.0) -> np.ndarray:
    """Second-order destruction row for one nu (phi frame)."""
    _, d = _perturbative_columns(basis, v1, lam, eta, "2")
    return d[basis.liouville_index(nu), :]


def creation_resolvent(basis: PhiBasis, v1: np.ndarray, lam: float, nu: NuIndex,
                       z: complex | None = None, eta: float = 0.0,
                       self_consistent: bool = False, max_iter: int = 60,
                       tol: float = 1e-13) -> tuple[np.ndarray, complex]:
    """Creation column from the resolvent linear solve on the Q block.

    Solves (z I - Q L Q) c = lam * Q L1 P at z = E0_nu (default) or at a
    caller-supplied z. With self_consistent=True, z is iterated to the fixed
    point z = E0_nu + lam V[nu,nu] + lam V[nu,:] c(z), which reproduces the
    exact kinetic eigenvalue. Returns (column, z_used).
    """
    k = basis.liouville_index(nu)
    n = basis.dim2
    mask = np.arange(n) != k
    lq = (np.diag(basis.e0) + lam * v1)[np.ix_(mask, mask)]
    rhs = lam * v1[mask, k]
    z_used = complex(basis.e0[k]) if z is None else complex(z)

    def solve(zval: complex) -> np.ndarray:
        a = (zval + 1j * eta) * np.eye(n - 1, dtype=np.complex128) - lq
        try:
            return np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError as exc:
            raise ResonanceError([(nu, nu)]) from exc

    cq = solve(z_used)
    if self_consistent:
        for _ in range(max_iter):
            z_next = complex(basis.e0[k] + lam * v1[k, k] + lam * (v1[k, mask] @ cq))
            if abs(z_next - z_used) <= tol * max(1.0, abs(z_next)):
                z_used = z_next
                cq = solve(z_used)
                break
            z_used = z_next
            cq = solve(z_used)
        else:
            raise ValueError(f"collision-energy iteration did not converge for nu={nu.as_tuple()}")
    out = np.zeros(n, dtype=np.complex128)
    out[mask] = cq
    return out, z_used


def stationary_residual(basis: PhiBasis, v1: np.ndarray, lam: float, nu: NuIndex,
                        column: np.ndarray, z: complex | None = None,
                        eta: float = 0.0) -> float:
    """Residual of the stationary creation equation for a candidate column.

    Checks (Q L Q - z - i eta) c + lam Q L1 P = 0 relative to the column and
    source scale.
    """
    k = basis.liouville_index(nu)
    n = basis.dim2
    mask = np.arange(n) != k
    lq = (np.diag(basis.e0) + lam * v1)[np.ix_(mask, mask)]
    z_used = complex(basis.e0[k]) if z is None else complex(z)
    res = (lq - (z_used + 1j * eta) * np.eye(n - 1)) @ column[mask] + lam * v1[mask, k]
    scale = max(float(np.linalg.norm(lam * v1[mask, k])), 1e-30)
    return float(np.linalg.norm(res)) / scale


def energies_second_order(basis: PhiBasis, v1: np.ndarray, lam: float,
                          eta: float = 0.0) -> np.ndarray:
    """Second-order kinetic eigenvalues for every nu (retarded branch)."""
    c1, _ = _perturbative_columns(basis, v1, lam, eta, "1")
    return _theta_energies(basis, v1, lam, c1)


def theta(decomp: Decomposition) -> np.ndarray:
    """Intermediate operator of a built decomposition (phi frame, diagonal)."""
    return decomp.theta_matrix()


def similarity_operator(decomp: Decomposition) -> np.ndarray:
    """Omega = I + C with L Omega = Omega Theta at exact order."""
    return decomp.omega()


def similarity_residual(decomp: Decomposition) -> float:
    """|| L Omega - Omega Theta || / || L || for the built order."""
    l_full = decomp.liouvillian()
    omega = decomp.omega()
    res = l_full @ omega - omega @ decomp.theta_matrix()
    return float(np.linalg.norm(res)) / norm_scale(l_full)


def total_projector(decomp: Decomposition, nu: NuIndex) -> np.ndarray:
    """Pi_nu of a built decomposition (phi frame)."""
    return decomp.total_projector(nu)


@dataclasses.dataclass(frozen=True)
class ProjectedDensity:
    """Kinetic coefficients c_nu of a state over the dyad grid."""

    coefficients: np.ndarray
    basis: PhiBasis

    def coefficient(self, nu: NuIndex) -> complex:
        return complex(self.coefficients[self.basis.liouville_index(nu)])

    def reconstruct(self) -> np.ndarray:
        """sum_nu c_nu |f_i><f_j| as a dense matrix in the original frame."""
        return self.basis.from_frame(self.coefficients)

    @property
    def trace(self) -> complex:
        d = self.basis.dim
        return complex(self.coefficients[:: d + 1].sum())


def project_density(decomp: Decomposition, rho: np.ndarray) -> ProjectedDensity:
    """Coefficients c_nu = weight of P_nu Pi_nu rho on each dyad."""
    rho_f = decomp.basis.to_frame(rho)
    kappa = decomp.pairing()
    if np.min(np.abs(kappa)) < DEFAULT_TOL:
        raise ValueError("(P + DC) numerically singular on at least one P block")
    left = np.eye(decomp.dim2, dtype=np.complex128) + decomp.d_rows
    coeff = (left @ rho_f) / kappa
    return ProjectedDensity(coefficients=coeff, basis=decomp.basis)


def evolve_projected(projected: ProjectedDensity, energies: np.ndarray, t: float) -> ProjectedDensity:
    """Kinetic evolution c_nu(t) = e^{-i E_nu t} c_nu(0).

    energies may be the E_nu array or the diagonal Theta matrix.
    """
    energies = np.asarray(energies)
    if energies.ndim == 2:
        energies = np.diag(energies)
    phases = np.exp(-1j * energies * t)
    return ProjectedDensity(coefficients=phases * projected.coefficients,
                            basis=projected.basis)


def evolve_exact(hamiltonian, rho0, t: float) -> np.ndarray:
    """Brute-force commutator evolution rho(t) = unvec(e^{-i L t} vec rho0).

    Reference oracle route: builds the full Liouvillian of the supplied
    Hamiltonian and exponentiates it, independent of the projected machinery.
    """
    h = as_complex_matrix(hamiltonian, "hamiltonian")
    rho = as_complex_matrix(rho0, "rho0")
    l_full = commutator_superop(h)
    return unvec(expm_action(l_full, t, vec(rho)), h.shape[0])


def evolve_grid(hamiltonian, rho0, times) -> np.ndarray:
    """rho(t) on a time grid from one eigendecomposition of H.

    Same commutator flow as evolve_exact, factored through
    e^{-iHt} rho e^{+iHt}; falls back to per-point exponentials when H is
    defective. Returns an array of shape (len(times), d, d).
    """
    h = as_complex_matrix(hamiltonian, "hamiltonian")
    rho = as_complex_matrix(rho0, "rho0")
    ts = np.asarray(times, dtype=np.float64)
    try:
        system = eig(h)
    except DefectiveMatrixError:
        return np.stack([evolve_exact(h, rho, float(t)) for t in ts])
    core = system.left_vectors @ rho @ system.right_vectors
    out = np.empty((ts.shape[0], h.shape[0], h.shape[0]), dtype=np.complex128)
    for k, t in enumerate(ts):
        phases = np.exp(-1j * system.values * t)
        out[k] = ((system.right_vectors * phases) @ core
                  @ ((1.0 / phases)[:, None] * system.left_vectors))
    return out


def kinetic_consistency_residual(decomp: Decomposition, hamiltonian, rho0,
                                 t: float) -> float:
    """Operator-norm gap between projected exact evolution and kinetic phases.

    Compares P_nu Pi_nu e^{-iLt} rho0 (exact route) against
    e^{-i Theta t} P_nu Pi_nu rho0 (kinetic route), reconstructed over all nu.
    """
    lhs = project_density(decomp, evolve_exact(hamiltonian, rho0, t))
    rhs = evolve_projected(project_density(decomp, rho0), decomp.energies, t)
    gap = lhs.coefficients - rhs.coefficients
    return float(np.linalg.norm(decomp.basis.from_frame(gap), ord=2))
