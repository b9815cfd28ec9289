#include "normlap/spectrum_table.hpp"

#include <array>
#include <mutex>
#include <string>
#include <vector>

namespace normlap {

namespace {

struct Table {
    std::once_flag once;
    std::vector<TableEntry> entries;
    Hygiene hygiene;
};

std::array<Table, kTableMaxOrder + 1> tables;

void build(Table& t, int n) {
    const int pairs = n * (n - 1) / 2;
    const std::uint64_t count = std::uint64_t{1} << pairs;
    t.entries.resize(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const Spectrum s = spectrum(Graph::from_mask(n, mask));
        t.entries[mask] = {n >= 2 ? s.lambda2() : 0.0, s.rho()};
        t.hygiene.merge(s.hygiene);
    }
}

Table& table_for(int n) {
    if (n < 1 || n > kTableMaxOrder) {
        throw std::out_of_range("spectrum table covers orders 1.." + std::to_string(kTableMaxOrder));
    }
    Table& t = tables[static_cast<std::size_t>(n)];
    std::call_once(t.once, [&] { build(t, n); });
    return t;
}

}  // namespace

std::span<const TableEntry> spectrum_table(int n) { return table_for(n).entries; }

Hygiene spectrum_table_hygiene(int n) { return table_for(n).hygiene; }

double target_value(int n, std::uint64_t mask, Target which) {
    const TableEntry& e = spectrum_table(n)[mask];
    return which == Target::SecondSmallest ? e.lambda2 : e.rho;
}

double target_value(const Graph& g, Target which) {
    if (g.order() <= kTableMaxOrder) return target_value(g.order(), g.edge_mask(), which);
    const Spectrum s = spectrum(g);
    return which == Target::SecondSmallest ? s.lambda2() : s.rho();
}

}  // namespace normlap
