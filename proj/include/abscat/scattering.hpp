#pragma once

#include <complex>
#include <string>
#include <vector>

#include "abscat/fields.hpp"
#include "abscat/geometry.hpp"
#include "abscat/xray.hpp"

namespace abscat {

using Complex = std::complex<double>;

// Asymptotic configuration: complex amplitude on a uniform transverse grid
// times a Gaussian longitudinal profile. Node (i, j) sits at
// center + ((i - (n-1)/2) e1 + (j - (n-1)/2) e2) * spacing; all implemented
// phases are constant along the propagation direction.
struct WavePacket {
    Vec3 dir;    // unit propagation direction
    Vec3 center; // grid center
    Vec3 e1, e2; // orthonormal, both orthogonal to dir
    double spacing = 0.0;
    int n = 0;
    std::vector<Complex> amp; // row-major, n*n
    double sigma_par = 1.0;   // longitudinal Gaussian width (L2-normalized profile)

    double offset(int i) const { return (i - 0.5 * (n - 1)) * spacing; }
    Vec3 node_pos(int i, int j) const { return center + e1 * offset(i) + e2 * offset(j); }
    Complex& at(int i, int j) { return amp[size_t(i) * n + j]; }
    const Complex& at(int i, int j) const { return amp[size_t(i) * n + j]; }

    // Discrete transverse mass sum |amp|^2 spacing^2.
    double mass() const;
    void check_grid_compatible(const WavePacket& other) const;
};

// Normalized Gaussian packet of transverse width sigma_perp centered at
// center + c1 e1 + c2 e2.
WavePacket gaussian_packet(const Vec3& dir, const Vec3& center, int n, double spacing,
                           double sigma_perp, double sigma_par, double c1 = 0.0, double c2 = 0.0);

struct ScatteredPacket {
    WavePacket packet;
    std::string potential_tag;
};

// Leading-order scattering: nodewise multiplication by e^{i a(v, node)}.
// Every node carrying amplitude must have an exterior ray.
ScatteredPacket apply_S_leading(const PotentialField& A, const ObstacleSet& K,
                                const WavePacket& phi, const XrayOptions& opt = {});

// Discrete L2 pairing sum phi conj(psi) spacing^2 (pairwise summation).
Complex inner_product(const WavePacket& phi, const WavePacket& psi);
Complex inner_product(const ScatteredPacket& phi, const WavePacket& psi);

struct NextOrderConfig {
    double mass = 1.0;
    double tol = 1e-8;
    int longitudinal_nodes = 24;
    double fd_check_fraction = 0.05; // 2nd vs 4th order FD disagreement gate
};

struct NextOrderResult {
    Complex total{};
    Complex v_term{};
    Complex xi_minus_linear{};
    Complex xi_minus_quadratic{};
    Complex xi_plus_linear{};
    Complex xi_plus_quadratic{};
};

// Next-to-leading matrix element of the high-velocity expansion: the electric
// term -i e^{ia} (integral of V along each node ray) plus the two
// first-moment magnetic terms with the momentum realized by 4th-order
// central differences transversally.
NextOrderResult next_order_matrix_element(const PotentialField& A, const ScalarPotentialModel& V,
                                          const MagneticFieldModel& B, const ObstacleSet& K,
                                          const WavePacket& phi, const WavePacket& psi,
                                          const NextOrderConfig& cfg = {});

} // namespace abscat
