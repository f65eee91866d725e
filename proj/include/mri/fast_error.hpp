#pragma once

#include <span>
#include <string>
#include <string_view>

namespace mri {

/// How the fast-scale error of an MRI step is estimated.
///   FS   - rerun the whole step with the embedded fast method, compare outputs.
///   SA   - per stage, re-solve with the embedded fast method from the primary
///          stage data and aggregate the stage differences.
///   LASA - accumulate per-substep embedded differences of the primary solve,
///          then aggregate across stages.
struct FastErrorStrategy {
  enum class Kind { FS, SA, LASA };
  enum class Aggregate { mean, max };

  Kind kind = Kind::LASA;
  Aggregate aggregate = Aggregate::mean;  // ignored for FS

  static FastErrorStrategy full_step() { return {Kind::FS, Aggregate::max}; }
  static FastErrorStrategy stage_aggregate(Aggregate a) { return {Kind::SA, a}; }
  static FastErrorStrategy lasa(Aggregate a) { return {Kind::LASA, a}; }

  /// Accepts the CLI spellings fs, sa-mean, sa-max, lasa-mean, lasa-max.
  static FastErrorStrategy parse(std::string_view text);
  [[nodiscard]] std::string label() const;

  friend bool operator==(const FastErrorStrategy& a, const FastErrorStrategy& b) {
    return a.kind == b.kind && (a.kind == Kind::FS || a.aggregate == b.aggregate);
  }
};

/// Mean or max over per-stage error values; 0 for an empty list.
double aggregate_stage_errors(std::span<const double> stage_errors, FastErrorStrategy::Aggregate how);

}  // namespace mri
