"""Independent brute-force references: dense complex spin matrices and
expectation values, kept deliberately separate from the library's O(N)
paths so they can arbitrate them."""

import numpy as np
from scipy.linalg import expm


def dense_spin_matrices(n_particles: int):
    """(Jx, Jy, Jz) as dense complex matrices in the ascending-m basis."""
    j = n_particles / 2.0
    m = np.arange(n_particles + 1) - j
    jz = np.diag(m)
    jp = np.zeros((n_particles + 1, n_particles + 1))
    for i in range(n_particles):
        # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1))
        jp[i + 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    jm = jp.T
    jx = 0.5 * (jp + jm)
    jy = (jp - jm) / 2j
    return jx.astype(complex), jy, jz.astype(complex)


def dense_hamiltonian(n_particles: int, lam: float, delta: float) -> np.ndarray:
    jx, _, jz = dense_spin_matrices(n_particles)
    return (-jx + (lam / n_particles) * jz @ jz + delta * jz).real


def dense_moments(n_particles: int, psi: np.ndarray):
    """All six moments via explicit psi^dagger M psi."""
    jx, jy, jz = dense_spin_matrices(n_particles)
    psi = psi.astype(complex)

    def ev(mat):
        return float((psi.conj() @ (mat @ psi)).real)

    return {
        "jx": ev(jx),
        "jy": ev(jy),
        "jz": ev(jz),
        "jx2": ev(jx @ jx),
        "jy2": ev(jy @ jy),
        "jz2": ev(jz @ jz),
    }


def dense_rotated_moments(n_particles: int, psi: np.ndarray, theta: float):
    """Moments of exp(-i theta Jx) |psi> via a dense matrix exponential."""
    jx, _, _ = dense_spin_matrices(n_particles)
    rotated = expm(-1j * theta * jx) @ psi.astype(complex)
    jxm, jym, jzm = dense_spin_matrices(n_particles)

    def ev(mat):
        return float((rotated.conj() @ (mat @ rotated)).real)

    return {
        "jx": ev(jxm),
        "jy": ev(jym),
        "jz": ev(jzm),
        "jx2": ev(jxm @ jxm),
        "jy2": ev(jym @ jym),
        "jz2": ev(jzm @ jzm),
    }


def random_real_state(n_particles: int, rng) -> np.ndarray:
    psi = rng.standard_normal(n_particles + 1)
    return psi / np.linalg.norm(psi)
