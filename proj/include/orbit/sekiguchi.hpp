#pragma once

#include <optional>
#include <vector>

#include "orbit/moment.hpp"
#include "orbit/sl2.hpp"

namespace orbit {

/// Morphism attached to a core point nu = i zeta of a nilpotent orbit in
/// i g_R: the strictly normal triple over zeta packaged as a map, so that
/// Phi0(i e) = nu.
SlHom morphism_from_gr_core(const GVector& nu, double tol = 1e-9);

/// Morphism attached to a core point zeta of a nilpotent K-orbit in p:
/// the unique Phi0 in Mor^{R,theta} with Phi0(h/2 + ie/2 + if/2) = zeta.
/// Built through the Cayley conjugation between the two sl2 real forms.
SlHom morphism_from_p_core(const GVector& zeta, double tol = 1e-9);

enum class PartnerDirection { p_to_gr, gr_to_p };

/// Kostant-Sekiguchi partner of a nilpotent element, computed through cores:
/// descend to the core, read off the morphism, evaluate the opposite core
/// formula. Returns a core representative of the partner orbit.
GVector sekiguchi_partner(const GVector& x, PartnerDirection direction,
                          const DescentOptions& opt = {});

/// The deformation flow f_t(zeta) = Ad(exp(t Re zeta))(zeta). Re f_t(zeta)
/// equals Re zeta, and f_s . f_t = f_{s+t} on elements sharing Re zeta.
GVector deformation_flow(const GVector& zeta, double t);

/// Inverse of s e^{2 s t} = 1 on (0,1]: s(0) = 1, decreasing to 0.
double solve_s_of_t(double t);

struct ProbeRow {
  double t = 0.0;
  double s = 0.0;
  double distance = 0.0;       ///< |f_t(nu_t) - Phi0(ie)|
  double slope_estimate = 0.0; ///< local d log(distance) / d log(s)
};

/// Probes how the flowed family nu_t = s(t) Phi0(h+ie+if) approaches the
/// i g_R core point Phi0(ie); the distance decays like s(t).
std::vector<ProbeRow> convergence_probe(const SlHom& phi0,
                                        const std::vector<double>& t_grid);

void write_probe_csv(const std::vector<ProbeRow>& rows, const std::string& path);

/// Normal slice N(nu,a) = { Ad(exp i xi)(nu) : xi in q(nu) cap g_R, |xi| < a }
/// where q(nu) = (+)_{r>=1} (+)_{l<r} g(r,l) is a complement of ker ad(nu).
struct NormalSlice {
  GVector nu;
  double radius = 0.0;
  Eigen::MatrixXd q_basis;  ///< real columns spanning q(nu) cap g_R
};

NormalSlice normal_slice(const GVector& nu, const SlHom& phi0,
                         const IsotypicDecomposition& iso, double a);

/// Newton solve of Ad(exp i xi)(nu) = point for xi in the slice directions.
/// Returns xi on a hit; a miss (including Newton breakdown) is nullopt.
std::optional<GVector> slice_hit_test(const NormalSlice& slice, const GVector& point,
                                      double tol = 1e-9);

/// Compares two sl2-triples by the spectra of ad h (the desk-scale conjugacy
/// test for orbit identity).
bool same_h_spectrum(const Sl2Triple& a, const Sl2Triple& b, double tol = 1e-6);

} // namespace orbit
