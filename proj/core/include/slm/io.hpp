#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "slm/experiments.hpp"
#include "slm/measure.hpp"

namespace slm::io {

/// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

/// bin_lo,bin_hi,count,density
void write_histogram_csv(std::ostream& os, const measure::Histogram& h);

/// generation,bin_lo,bin_hi,count,density for every snapshot.
void write_evolution_csv(std::ostream& os, const experiments::Evolution& ev);

/// parameter,init,terminal_state in long format.
void write_bifurcation_csv(std::ostream& os, const experiments::BifurcationDataset& ds);

/// Ensemble dump: one comment header with generation and base_seed, then a
/// column `x` holding every particle at full precision.
void write_ensemble_csv(std::ostream& os, const measure::Ensemble& e);

/// Inverse of write_ensemble_csv. Throws ValidationError on malformed input.
measure::Ensemble read_ensemble_csv(std::istream& is);

/// Pretty-printed JSON documents (2-space indent, trailing newline).
std::string to_json(const experiments::ComparisonReport& r);
std::string to_json(const experiments::LemmaReport& r);
std::string to_json(std::span<const experiments::FlipflopRow> rows);
std::string to_json(const experiments::Evolution& ev, const ParameterDistribution& dist);
std::string to_json(const experiments::BifurcationDataset& ds);

}  // namespace slm::io
