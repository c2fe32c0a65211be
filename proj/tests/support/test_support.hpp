// tests/support/test_support.hpp

// Copyright 2026  The sprec authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Oracles used by the unit and acceptance suites. Everything here computes
// reference values through routes independent of the library implementation
// (FFT log-spectrum instead of recursions, root finding instead of the
// minimum-phase guarantee, direct counting instead of sorted sweeps).

#ifndef SPREC_TESTS_SUPPORT_TEST_SUPPORT_HPP_
#define SPREC_TESTS_SUPPORT_TEST_SUPPORT_HPP_

#include <complex>
#include <span>
#include <vector>

namespace sprec::testing {

// Iterative radix-2 transform; x.size() must be a power of two.
std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x,
                                      bool inverse = false);

// Cepstrum c_1..c_q of the minimum-phase model 1/A(z) via an n-point
// log-magnitude spectrum (doubled causal part of the real cepstrum).
std::vector<double> lpcc_fft_oracle(std::span<const double> a, int q, int n = 4096);

// Cepstrum c_1..c_q of the gain-normalized pole-sum spectrum
// sum_i 1/(1 - p_i e^{-jw}), evaluated numerically on an n-point grid.
std::vector<double> acw_fft_oracle(const std::vector<std::complex<double>>& poles,
                                   int q, int n = 4096);

// Roots of the monic polynomial z^P + c[1] z^(P-1) + ... + c[P]
// (pass coefficients including the leading 1) by Durand-Kerner iteration.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> monic);

// Brute-force equal error rate: FAR/FRR counted directly at every distinct
// threshold, same interpolation rule as the library.
double eer_bruteforce(std::span<const double> client, std::span<const double> impostor);

}  // namespace sprec::testing

#endif  // SPREC_TESTS_SUPPORT_TEST_SUPPORT_HPP_
