#pragma once

#include <span>
#include <vector>

#include "lemlab/core.hpp"

// Data-parallel per-sample kernels. Every kernel has a serial reference
// implementation and an OpenMP variant producing bit-identical output
// (each sample is computed independently by the same scalar expression).
// The *_auto dispatchers pick the OpenMP path for large inputs.

namespace lemlab::kernels {

/// In-place radix-2 FFT. sign = -1: forward, X_m = sum_j x_j e^{-2pi i jm/M};
/// sign = +1: unnormalized inverse, x_j = sum_m X_m e^{+2pi i jm/M}.
void fft_pow2(std::vector<cplx>& a, int sign);

/// Synthesize samples from a length-M spectrum: z_j = sum_m S[m] e^{i m theta_j}.
std::vector<cplx> synth_spectrum(std::vector<cplx> spectrum);

/// Forward Fourier analysis of samples: returns S with S[m] = (1/M) sum_j z_j e^{-i m theta_j}.
std::vector<cplx> fourier_coefficients(std::vector<cplx> samples);

// Direct (non-FFT) synthesis of a truncated exterior Laurent map on the
// uniform theta grid: z_j = b e^{i theta_j} + sum_k a_k e^{-i k theta_j}.
// Serves both as the reference for the FFT path and as the OpenMP kernel.
std::vector<cplx> synth_laurent_serial(double b, std::span<const cplx> a, int M);
std::vector<cplx> synth_laurent_parallel(double b, std::span<const cplx> a, int M);
std::vector<cplx> synth_laurent_auto(double b, std::span<const cplx> a, int M);

// Same for the theta-derivative: dz/dtheta on the grid.
std::vector<cplx> synth_laurent_dtheta_serial(double b, std::span<const cplx> a, int M);
std::vector<cplx> synth_laurent_dtheta_parallel(double b, std::span<const cplx> a, int M);
std::vector<cplx> synth_laurent_dtheta_auto(double b, std::span<const cplx> a, int M);

// w_j = Im(conj(u_j) v_j) - rhs.
std::vector<double> im_conj_product_minus_serial(std::span<const cplx> u,
                                                 std::span<const cplx> v, double rhs);
std::vector<double> im_conj_product_minus_parallel(std::span<const cplx> u,
                                                   std::span<const cplx> v, double rhs);
std::vector<double> im_conj_product_minus_auto(std::span<const cplx> u,
                                               std::span<const cplx> v, double rhs);

// r_j = log_scale + sum_i mult_i log|z_j - node_i| (log|P| of a factored polynomial).
std::vector<double> log_abs_factored_serial(double log_scale, std::span<const cplx> nodes,
                                            std::span<const int> mults,
                                            std::span<const cplx> z);
std::vector<double> log_abs_factored_parallel(double log_scale, std::span<const cplx> nodes,
                                              std::span<const int> mults,
                                              std::span<const cplx> z);
std::vector<double> log_abs_factored_auto(double log_scale, std::span<const cplx> nodes,
                                          std::span<const int> mults,
                                          std::span<const cplx> z);

// Horner evaluation of an ascending-coefficient polynomial at many points.
std::vector<cplx> horner_many_serial(std::span<const cplx> coeffs, std::span<const cplx> pts);
std::vector<cplx> horner_many_parallel(std::span<const cplx> coeffs, std::span<const cplx> pts);
std::vector<cplx> horner_many_auto(std::span<const cplx> coeffs, std::span<const cplx> pts);

// True iff the closed polygon through the samples has no self-intersection
// and no coincident consecutive vertices.
bool polygon_is_simple_serial(std::span<const cplx> poly);
bool polygon_is_simple_parallel(std::span<const cplx> poly);
bool polygon_is_simple_auto(std::span<const cplx> poly);

/// Winding number of the closed polygon about the point p.
int winding_number(std::span<const cplx> poly, cplx p);

/// Point-in-polygon via winding number (nonzero rule).
bool point_in_polygon(std::span<const cplx> poly, cplx p);

}  // namespace lemlab::kernels
