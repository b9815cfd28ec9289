#pragma once

#include "normlap/theorems.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace normlap {

struct ReproduceRow {
    std::string id;
    std::string name;
    std::string expected;
    std::string computed;
    double tolerance = 0.0;
    bool pass = false;
};

struct ReproduceOptions {
    int jobs = 1;
};

/// Every anchor and exhaustive check, one row each. Failures are rows, not exceptions.
std::vector<ReproduceRow> reproduce(const ReproduceOptions& options = {});

struct ReplaySample {
    ProofInstance instance;
    ProofTrace trace;
};

/// `count` proof replays for a theorem with a replay (T3.1, T3.3, T3.6, T4.1, T4.2, T4.3),
/// drawn from connected graphs on 3..6 vertices by a seeded generator. The eigenfunction is
/// the first basis function meeting the hypothesis. For T3.1 half the samples come from
/// each proof case.
std::vector<ReplaySample> sample_replays(TheoremId id, int count, std::uint64_t seed = 20240601);

void write_rows_table(std::ostream& out, const std::vector<ReproduceRow>& rows);
void write_rows_json(std::ostream& out, const std::vector<ReproduceRow>& rows);
void write_rows_csv(std::ostream& out, const std::vector<ReproduceRow>& rows);

}  // namespace normlap
