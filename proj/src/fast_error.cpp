#include "mri/fast_error.hpp"

#include <algorithm>
#include <stdexcept>

namespace mri {

FastErrorStrategy FastErrorStrategy::parse(std::string_view text) {
  if (text == "fs") return full_step();
  if (text == "sa-mean") return stage_aggregate(Aggregate::mean);
  if (text == "sa-max") return stage_aggregate(Aggregate::max);
  if (text == "lasa-mean") return lasa(Aggregate::mean);
  if (text == "lasa-max") return lasa(Aggregate::max);
  throw std::invalid_argument("unknown fast-error strategy '" + std::string(text) +
                              "' (expected fs|sa-mean|sa-max|lasa-mean|lasa-max)");
}

std::string FastErrorStrategy::label() const {
  switch (kind) {
    case Kind::FS:
      return "fs";
    case Kind::SA:
      return aggregate == Aggregate::mean ? "sa-mean" : "sa-max";
    case Kind::LASA:
      return aggregate == Aggregate::mean ? "lasa-mean" : "lasa-max";
  }
  return "?";
}

double aggregate_stage_errors(std::span<const double> stage_errors, FastErrorStrategy::Aggregate how) {
  if (stage_errors.empty()) return 0.0;
  if (how == FastErrorStrategy::Aggregate::max) {
    return *std::max_element(stage_errors.begin(), stage_errors.end());
  }
  double sum = 0.0;
  for (double e : stage_errors) sum += e;
  return sum / static_cast<double>(stage_errors.size());
}

}  // namespace mri
