#pragma once

#include "normlap/graph.hpp"
#include "normlap/spectral.hpp"
#include "normlap/theorems.hpp"

#include <json.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace normlap {

inline constexpr int kMaxScanOrder = 8;

enum class Operation { None, Subdivision, Identification, Transfer };
std::string_view to_string(Operation op);
Operation theorem_operation(TheoremId id);

/// Order of lhs against rhs: less if lhs < rhs - gap, greater if lhs > rhs + gap.
enum class Direction { Less, Equal, Greater };
std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);
Direction classify_direction(double lhs, double rhs, double gap = 1e-6);

/// Calls fn(mask, graph) for every connected labelled graph on n vertices, in
/// increasing edge-mask order. 1 <= n <= 8.
void for_each_connected(int n, const std::function<void(std::uint64_t, const Graph&)>& fn);
std::vector<Graph> enumerate_connected(int n);

/// Labelled tree with the given Pruefer index (base-n digits, most significant first).
Graph tree_from_pruefer(int n, std::uint64_t index);
/// n^(n-2) for n >= 2, 1 for n = 1.
std::uint64_t labelled_tree_count(int n);

/// {P_k, C_k, K_k, S_k : k <= 5} without isomorphic repeats (12 graphs).
std::vector<NamedFamily> family_catalog();

struct ScanConfig {
    int n_max = 6;
    /// Cap on |targets| for edge transfers.
    int max_transfer = 2;
    /// Witnesses kept per bucket.
    int witness_cap = 3;
    /// Largest glued order for enumerated identification pairs (catalog pairs are always scanned).
    int pair_order_max = 6;
    int jobs = 1;
    CheckOptions options;
    /// Replaces native enumeration when set. Identification pairs each stream graph with the catalog.
    std::optional<std::vector<Graph>> graphs;

    /// Throws std::invalid_argument.
    void validate() const;
};

/// Position of an instance in the deterministic scan order.
struct ScanKey {
    int order = 0;
    std::uint64_t index = 0;
    std::uint64_t ordinal = 0;
    auto operator<=>(const ScanKey&) const = default;
};

struct Witness {
    ScanKey key;
    Direction direction = Direction::Equal;
    Verdict verdict;
};

struct CaseTally {
    Operation operation = Operation::None;
    Target target = Target::SecondSmallest;
    Precondition state = Precondition::Unconditional;
    /// Indexed by Direction.
    std::array<long, 3> counts{};
    std::array<std::vector<Witness>, 3> witnesses;
    /// Instances in this stratum whose verdict failed.
    long violations = 0;

    long total() const { return counts[0] + counts[1] + counts[2]; }
    long count(Direction d) const { return counts[static_cast<std::size_t>(d)]; }
};

struct ScanResult {
    TheoremId theorem = TheoremId::T3_1;
    /// Indexed by Precondition.
    std::array<CaseTally, 4> strata;
    long instances = 0;
    long violations = 0;
    std::vector<Witness> violators;
    /// Stored witnesses whose fresh recheck disagreed with the scan.
    long reverify_failures = 0;

    const CaseTally& stratum(Precondition p) const { return strata[static_cast<std::size_t>(p)]; }
    CaseTally& stratum(Precondition p) { return strata[static_cast<std::size_t>(p)]; }
};

ScanResult scan_theorem(TheoremId id, const ScanConfig& config);

/// First instance in scan order with the given stratum and direction, re-verified
/// through the public checker. Always single-threaded.
std::optional<Witness> find_witness(TheoremId id, Precondition state, Direction direction, const ScanConfig& config);

/// Runs the public checker on the instance described by v.theorem, v.graph6 and v.params.
Verdict recheck(const Verdict& v, const CheckOptions& opts = {});
/// True if a fresh recheck reproduces the witness's precondition and direction.
bool reverifies(const Witness& w, const CheckOptions& opts = {});

nlohmann::json to_json(const Witness& w);
/// JSON lines: one per non-empty stratum, one per witness, then a summary line.
void write_scan_jsonl(std::ostream& out, const ScanResult& r);
void write_scan_table(std::ostream& out, const ScanResult& r);
void write_scan_csv(std::ostream& out, const ScanResult& r);

}  // namespace normlap
