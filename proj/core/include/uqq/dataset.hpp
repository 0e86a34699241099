#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqq/graph.hpp"
#include "uqq/qaoa.hpp"

namespace uqq {

/// One dataset line: `family n seed m i1 j1 ... im jm [angles...]`.
/// All integers decimal; optional trailing floats are the 2p target angles.
struct GraphRecord {
    Graph graph;
    std::optional<std::vector<double>> target;
    std::string id;  // derived from file stem and line index
};

std::vector<GraphRecord> read_records(const std::string& path);
void write_records(const std::vector<GraphRecord>& records, const std::string& path);

struct DatasetSpec {
    int train_n = 14;
    int train_per_family = 60;
    int val_per_family = 20;
    int test_per_family = 12;
    std::vector<int> test_sizes{8, 10, 12, 14, 16};
    std::uint64_t master_seed = 42;
};

struct DatasetFiles {
    std::string train;
    std::string val;
    std::vector<std::pair<int, std::string>> test;  // (n, path)
};

/// Writes train/val/test record files under out_dir; byte-identical for
/// identical spec.
DatasetFiles gen_dataset(const DatasetSpec& spec, const std::string& out_dir);

struct TargetOptions {
    int restarts = 8;
    int iters_per_restart = 100;
    std::uint64_t seed = 42;
};

/// Multi-restart Nelder-Mead on the exact objective. Restart 1 starts at
/// theta = 0 (so F(theta*) >= m/2 always); the rest start uniformly in
/// [-pi, pi]^(2p). Targets are local optima, stored back on each record.
std::vector<double> optimize_target(const Graph& g, int p, const TargetOptions& opts);

/// Computes and appends targets for every record in the file (rewrites it).
void gen_targets(const std::string& path, int p, const TargetOptions& opts);

}  // namespace uqq
