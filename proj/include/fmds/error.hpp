#pragma once

#include <stdexcept>
#include <string>

namespace fmds {

// Error codes shared by the whole library. The CLI maps categories onto
// process exit codes (validation 3, numerical 4, non-convergence 5).
enum class errc {
  // input / validation
  asymmetric_matrix,
  negative_entry,
  non_zero_diagonal,
  non_finite,
  id_mismatch,
  unbalanced_design,
  duplicate_leaf_name,
  unknown_leaf,
  zero_total_weight,
  zero_denominator_pair,
  zero_row_sum,
  single_group,
  too_few_samples,
  group_too_small,
  invalid_k,
  negative_branch_length,
  unbalanced_parenthesis,
  unexpected_token,
  missing_terminator,
  invalid_spec,
  io_error,
  // numerical
  degenerate_within_group,
  eigen_failure,
  non_positive_quadratic_coefficient,
  degenerate_embedding,
  zero_variance,
  degenerate_denominator,
  non_psd_covariance,
  truncation_mass_too_small,
  // convergence
  max_iterations_exceeded,
};

enum class error_category { validation, numerical, convergence };

error_category category_of(errc code);
const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const { return code_; }
  error_category category() const { return category_of(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void throw_error(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fmds
