#pragma once

#include "normlap/graph.hpp"
#include "normlap/spectral.hpp"

#include <cstdint>
#include <span>

namespace normlap {

/// Largest order whose labelled graphs are tabulated.
inline constexpr int kTableMaxOrder = 7;

struct TableEntry {
    /// 0 for n = 1.
    double lambda2 = 0.0;
    double rho = 0.0;
};

/// lambda_2 and rho of every labelled graph on n vertices, indexed by edge mask.
/// Built on first use (once per order, thread-safe) and read-only afterwards.
std::span<const TableEntry> spectrum_table(int n);

/// Certificates of every decomposition that went into the table of order n.
Hygiene spectrum_table_hygiene(int n);

/// Target eigenvalue of g, from the table when g.order() <= kTableMaxOrder.
double target_value(const Graph& g, Target which);
double target_value(int n, std::uint64_t mask, Target which);

}  // namespace normlap
