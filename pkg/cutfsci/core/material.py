# -*- coding: utf-8 -*-
"""Compressible Neo-Hookean material in plane strain.

Strain energy psi = c [tr(F^T F) - 3] + (c / beta) (J^(-2 beta) - 1) with
c = E / (4 (1 + nu)) and beta = nu / (1 - 2 nu). For nu = 0 the analytic
limit psi = c [tr(F^T F) - 3] - 2 c ln J is used. The out-of-plane stretch
is one, so tr(F^T F) = tr_2(C) + 1.
"""
from dataclasses import dataclass

import numpy as np

from ..exception import ConfigurationError, ElementInversionError

IDENTITY = np.eye(2)


@dataclass(frozen=True)
class NeoHookeMaterial:
    youngs_modulus: float
    poisson_ratio: float
    density: float = 0.0

    def __post_init__(self):
        if self.youngs_modulus <= 0.0:
            raise ConfigurationError(f"Young's modulus must be positive, got {self.youngs_modulus}")
        if not -1.0 < self.poisson_ratio < 0.5:
            raise ConfigurationError(f"Poisson ratio must lie in (-1, 0.5), got {self.poisson_ratio}")
        if self.density < 0.0:
            raise ConfigurationError(f"Density must be non-negative, got {self.density}")

    @property
    def c(self) -> float:
        return self.youngs_modulus / (4.0 * (1.0 + self.poisson_ratio))

    @property
    def beta(self) -> float:
        return self.poisson_ratio / (1.0 - 2.0 * self.poisson_ratio)


def determinant(F):
    return F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]


def inverse(F):
    det = determinant(F)
    inv = np.empty_like(F)
    inv[..., 0, 0] = F[..., 1, 1]
    inv[..., 1, 1] = F[..., 0, 0]
    inv[..., 0, 1] = -F[..., 0, 1]
    inv[..., 1, 0] = -F[..., 1, 0]
    return inv / det[..., None, None]


def _check_jacobian(J, element=None):
    if np.any(J <= 0.0):
        raise ElementInversionError("Non-positive deformation Jacobian", element=element)


def strain_energy(material: NeoHookeMaterial, F):
    """Strain energy density at deformation gradients F (..., 2, 2)."""
    F = np.asarray(F, dtype=float)
    J = determinant(F)
    _check_jacobian(J)
    c, beta = material.c, material.beta
    trace = np.einsum('...ij,...ij->...', F, F) + 1.0
    if beta == 0.0:
        return c * (trace - 3.0) - 2.0 * c * np.log(J)
    return c * (trace - 3.0) + c / beta * (J ** (-2.0 * beta) - 1.0)


def neo_hooke_stress(material: NeoHookeMaterial, F, c=None, beta=None):
    """Second Piola-Kirchhoff stress, Cauchy stress and material tangent dS/dE.

    :param material: the material, or None when `c` and `beta` are given per point.
    :param F: deformation gradients (..., 2, 2).
    :return: S (..., 2, 2), sigma (..., 2, 2), tangent (..., 2, 2, 2, 2).
    """
    F = np.asarray(F, dtype=float)
    if material is not None:
        c, beta = material.c, material.beta
    c = np.asarray(c, dtype=float)
    beta = np.asarray(beta, dtype=float)
    J = determinant(F)
    _check_jacobian(J)
    C = np.einsum('...ki,...kj->...ij', F, F)
    C_inv = inverse(C)
    j_pow = J ** (-2.0 * beta)
    S = 2.0 * c[..., None, None] * (IDENTITY - j_pow[..., None, None] * C_inv)
    b = np.einsum('...ik,...jk->...ij', F, F)
    sigma = (2.0 * c / J)[..., None, None] * (b - j_pow[..., None, None] * IDENTITY)
    sym = 0.5 * (np.einsum('...ik,...jl->...ijkl', C_inv, C_inv)
                 + np.einsum('...il,...jk->...ijkl', C_inv, C_inv))
    tangent = (4.0 * c * j_pow)[..., None, None, None, None] * (
        beta[..., None, None, None, None] * np.einsum('...ij,...kl->...ijkl', C_inv, C_inv) + sym)
    return S, sigma, tangent


def normal_stress(F, normal, c, beta):
    """Cauchy normal stress n.sigma.n and its derivative with respect to F.

    sigma_nn = (2 c / J) (|F^T n|^2 - J^(-2 beta)).

    :param F: (k, 2, 2) deformation gradients.
    :param normal: (k, 2) unit normals, held fixed.
    :param c: (k,) material constants.
    :param beta: (k,) material constants.
    :return: sigma_nn (k,), d sigma_nn / dF (k, 2, 2).
    """
    F = np.asarray(F, dtype=float)
    J = determinant(F)
    _check_jacobian(J)
    ftn = np.einsum('kij,ki->kj', F, normal)
    j_pow = J ** (-2.0 * beta)
    sigma_nn = 2.0 * c / J * (np.einsum('kj,kj->k', ftn, ftn) - j_pow)
    f_inv_t = np.transpose(inverse(F), (0, 2, 1))
    d_sigma = (-sigma_nn[:, None, None] * f_inv_t
               + (2.0 * c / J)[:, None, None] * (2.0 * np.einsum('ki,kj->kij', normal, ftn)
                                                 + (2.0 * beta * j_pow)[:, None, None] * f_inv_t))
    return sigma_nn, d_sigma
