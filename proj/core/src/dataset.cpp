#include "uqq/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uqq/nelder_mead.hpp"
#include "uqq/rng.hpp"

namespace uqq {

std::vector<GraphRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_records: cannot open " + path);
    const std::string stem = std::filesystem::path(path).stem().string();

    std::vector<GraphRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string family;
        int n = 0, m = 0;
        std::uint64_t seed = 0;
        if (!(ss >> family >> n >> seed >> m))
            throw std::runtime_error("read_records: malformed line in " + path);
        std::vector<std::pair<int, int>> edges(m);
        for (auto& [i, j] : edges)
            if (!(ss >> i >> j))
                throw std::runtime_error("read_records: truncated edge list in " + path);

        GraphRecord rec;
        rec.graph = make_graph(n, std::move(edges));
        rec.graph.family = family_from_name(family);
        rec.graph.seed = seed;

        std::vector<double> target;
        double value = 0.0;
        while (ss >> value) target.push_back(value);
        if (!target.empty()) rec.target = std::move(target);

        char idbuf[96];
        std::snprintf(idbuf, sizeof(idbuf), "%s_%s_%03d", stem.c_str(), family.c_str(),
                      line_no);
        rec.id = idbuf;
        ++line_no;
        records.push_back(std::move(rec));
    }
    return records;
}

void write_records(const std::vector<GraphRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_records: cannot open " + path);
    char buf[64];
    for (const auto& rec : records) {
        out << family_name(rec.graph.family) << " " << rec.graph.n << " " << rec.graph.seed
            << " " << rec.graph.m();
        for (auto [i, j] : rec.graph.edges) out << " " << i << " " << j;
        if (rec.target) {
            for (double v : *rec.target) {
                std::snprintf(buf, sizeof(buf), " %.17g", v);
                out << buf;
            }
        }
        out << "\n";
    }
}

namespace {

constexpr GraphFamily kFamilies[] = {GraphFamily::ER, GraphFamily::REG3, GraphFamily::BA,
                                     GraphFamily::WS};

std::vector<GraphRecord> make_split(int n, int per_family, std::uint64_t master,
                                    const std::string& tag) {
    std::vector<GraphRecord> records;
    for (const auto family : kFamilies) {
        for (int i = 0; i < per_family; ++i) {
            const std::uint64_t seed =
                derive_seed(master, tag + "/" + family_name(family),
                            static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i));
            GraphRecord rec;
            rec.graph = generate(family, n, seed);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

}  // namespace

DatasetFiles gen_dataset(const DatasetSpec& spec, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    DatasetFiles files;

    auto emit = [&](const std::string& name, const std::vector<GraphRecord>& records) {
        const std::string path = out_dir + "/" + name;
        write_records(records, path);
        return path;
    };

    files.train = emit("train.graphs",
                       make_split(spec.train_n, spec.train_per_family, spec.master_seed,
                                  "train"));
    files.val = emit("val.graphs",
                     make_split(spec.train_n, spec.val_per_family, spec.master_seed, "val"));
    for (int n : spec.test_sizes) {
        const std::string name = "test_n" + std::to_string(n) + ".graphs";
        files.test.emplace_back(
            n, emit(name, make_split(n, spec.test_per_family, spec.master_seed, "test")));
    }
    return files;
}

std::vector<double> optimize_target(const Graph& g, int p, const TargetOptions& opts) {
    const CutTable table = cut_table(g);
    auto fn = [&table](std::span<const double> flat) {
        return expectation(table, evolve(table, AngleVector::from_flat(flat)));
    };

    Rng rng(derive_seed(opts.seed, "targets", g.seed));
    NelderMeadOptions nm;
    nm.max_iters = opts.iters_per_restart;

    std::vector<double> best;
    double best_f = -1e300;
    constexpr double kPi = 3.14159265358979323846;
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> start(2 * p, 0.0);
        if (r > 0)
            for (double& v : start) v = rng.uniform(-kPi, kPi);
        const NelderMeadResult res = nelder_mead(fn, start, nm);
        if (res.best_f > best_f) {
            best_f = res.best_f;
            best = res.best_x;
        }
    }
    return best;
}

void gen_targets(const std::string& path, int p, const TargetOptions& opts) {
    auto records = read_records(path);
    for (auto& rec : records) rec.target = optimize_target(rec.graph, p, opts);
    write_records(records, path);
}

}  // namespace uqq
