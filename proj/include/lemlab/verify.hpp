#pragma once

#include <string>
#include <vector>

#include "lemlab/io.hpp"

namespace lemlab::verify {

/// Families used across the verification batteries.
LemPoly circle_family(double b0, double t);    // P = z/b(t), b = sqrt(b0^2+2t)
LemPoly star_family(int n, double rho);        // P = z^n - rho^n (confluent z^n at rho=0)

std::vector<io::CheckResult> suite_circle();
std::vector<io::CheckResult> suite_lemma();
std::vector<io::CheckResult> suite_timerev();
std::vector<io::CheckResult> suite_destruction();

/// Runs one of {circle, lemma, timerev, destruction, all}; throws UsageError
/// on unknown suite names.
std::vector<io::CheckResult> run_suite(const std::string& name);

bool all_pass(const std::vector<io::CheckResult>& checks);

}  // namespace lemlab::verify
