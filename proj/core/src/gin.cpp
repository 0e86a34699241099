#include "uqq/gin.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uqq/rng.hpp"

namespace uqq {

int ParamStore::add(const std::string& name, Mat value) {
    names.push_back(name);
    values.push_back(std::move(value));
    return static_cast<int>(values.size()) - 1;
}

int ParamStore::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

std::size_t ParamStore::scalar_count() const {
    std::size_t total = 0;
    for (const auto& m : values) total += m.size();
    return total;
}

namespace {

Mat glorot(int rows, int cols, Rng& rng) {
    Mat m(rows, cols);
    const double limit = std::sqrt(6.0 / (rows + cols));
    for (double& v : m.a) v = rng.uniform(-limit, limit);
    return m;
}

Mat ones_row(int cols) {
    Mat m(1, cols);
    for (double& v : m.a) v = 1.0;
    return m;
}

}  // namespace

GinModel init_model(int k, int p, int hidden, int heads, std::uint64_t seed) {
    if (heads != 1 && heads != 2) throw std::invalid_argument("init_model: heads must be 1 or 2");
    GinModel model;
    model.k = k;
    model.p = p;
    model.hidden = hidden;
    model.heads = heads;
    Rng rng(derive_seed(seed, "model-init"));

    int in_dim = model.feature_dim();
    for (int l = 0; l < model.layers; ++l) {
        const std::string s = std::to_string(l);
        model.params.add("eps" + s, Mat(1, 1));
        model.params.add("w1_" + s, glorot(in_dim, hidden, rng));
        model.params.add("b1_" + s, Mat(1, hidden));
        model.params.add("w2_" + s, glorot(hidden, hidden, rng));
        model.params.add("b2_" + s, Mat(1, hidden));
        model.params.add("ln_g_" + s, ones_row(hidden));
        model.params.add("ln_b_" + s, Mat(1, hidden));
        in_dim = hidden;
    }
    const int out = 2 * p;
    model.params.add("w_mu", glorot(model.embed_dim(), out, rng));
    model.params.add("b_mu", Mat(1, out));
    if (heads == 2) {
        model.params.add("w_lv", glorot(model.embed_dim(), out, rng));
        model.params.add("b_lv", Mat(1, out));
    }
    return model;
}

Mat normalized_adjacency(const Graph& g) {
    const int n = g.n;
    Mat a(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = 1.0;
    for (auto [i, j] : g.edges) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) row_sum += a(i, j);
        for (int j = 0; j < n; ++j) a(i, j) /= row_sum;
    }
    return a;
}

Mat feature_matrix(const Graph& g, const SpectralEncoding& enc) {
    const auto rows = node_features(g, enc);
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

Mat degree_feature_matrix(const Graph& g) {
    const auto deg = g.degrees();
    Mat m(g.n, 1);
    for (int v = 0; v < g.n; ++v)
        m(v, 0) = static_cast<double>(deg[v]) / static_cast<double>(g.n);
    return m;
}

std::vector<Tape::Id> emit_params(Tape& tape, const GinModel& model) {
    std::vector<Tape::Id> ids;
    ids.reserve(model.params.values.size());
    for (const auto& value : model.params.values) ids.push_back(tape.leaf(value, true));
    return ids;
}

ForwardIds gin_forward(Tape& tape, const GinModel& model, const std::vector<Tape::Id>& pids,
                       const Mat& features, const Mat& a_hat) {
    if (features.cols != model.feature_dim())
        throw std::invalid_argument("gin_forward: feature dimension does not match model k");
    auto pid = [&](const std::string& name) {
        const int idx = model.params.index_of(name);
        if (idx < 0) throw std::logic_error("gin_forward: missing parameter " + name);
        return pids[idx];
    };

    Tape::Id h = tape.leaf(features, false);
    for (int l = 0; l < model.layers; ++l) {
        const std::string s = std::to_string(l);
        Tape::Id combined = tape.gin_combine(h, pid("eps" + s), a_hat);
        Tape::Id z1 = tape.add_rowvec(tape.matmul(combined, pid("w1_" + s)), pid("b1_" + s));
        Tape::Id a1 = tape.relu(z1);
        Tape::Id z2 = tape.add_rowvec(tape.matmul(a1, pid("w2_" + s)), pid("b2_" + s));
        h = tape.layer_norm(z2, pid("ln_g_" + s), pid("ln_b_" + s));
    }

    Tape::Id pooled = tape.concat_cols(tape.mean_rows(h), tape.max_rows(h));

    ForwardIds out;
    out.embedding = pooled;
    out.mu = tape.add_rowvec(tape.matmul(pooled, pid("w_mu")), pid("b_mu"));
    if (model.heads == 2) {
        Tape::Id raw = tape.add_rowvec(tape.matmul(pooled, pid("w_lv")), pid("b_lv"));
        out.logvar = tape.clamp(raw, model.clamp_lo, model.clamp_hi);
    }
    return out;
}

GaussianPrediction predict(const GinModel& model, const Mat& features, const Mat& a_hat,
                           std::vector<double>* embedding_out) {
    Tape tape;
    const auto pids = emit_params(tape, model);
    const ForwardIds ids = gin_forward(tape, model, pids, features, a_hat);

    GaussianPrediction pred;
    const Mat& mu = tape.value(ids.mu);
    pred.mu.assign(mu.a.begin(), mu.a.end());
    if (ids.logvar >= 0) {
        const Mat& lv = tape.value(ids.logvar);
        pred.var.resize(lv.a.size());
        for (std::size_t j = 0; j < lv.a.size(); ++j) pred.var[j] = std::exp(lv.a[j]);
    }
    if (embedding_out) {
        const Mat& emb = tape.value(ids.embedding);
        embedding_out->assign(emb.a.begin(), emb.a.end());
    }
    return pred;
}

GaussianPrediction predict(const GinModel& model, const Graph& g) {
    const Mat feats = model.k > 0
                          ? feature_matrix(g, spectral_encoding(g, model.k, 0))
                          : degree_feature_matrix(g);
    return predict(model, feats, normalized_adjacency(g));
}

void snap_to_float32(GinModel& model) {
    for (auto& m : model.params.values)
        for (double& v : m.a) v = static_cast<double>(static_cast<float>(v));
}

void checkpoint_save(const GinModel& model, const std::string& path) {
    GinModel snapped = model;
    snap_to_float32(snapped);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint_save: cannot open " + path);
    char buf[128];
    out << "uqq-ckpt-v1\n";
    out << "k " << snapped.k << "\n";
    out << "p " << snapped.p << "\n";
    out << "hidden " << snapped.hidden << "\n";
    out << "layers " << snapped.layers << "\n";
    out << "heads " << snapped.heads << "\n";
    std::snprintf(buf, sizeof(buf), "clamp %.17g %.17g\n", snapped.clamp_lo, snapped.clamp_hi);
    out << buf;
    std::snprintf(buf, sizeof(buf), "u_med %.17g\n", snapped.u_med);
    out << buf;
    std::snprintf(buf, sizeof(buf), "u_iqr %.17g\n", snapped.u_iqr);
    out << buf;
    out << "tensors " << snapped.params.values.size() << "\n";
    for (std::size_t i = 0; i < snapped.params.values.size(); ++i) {
        const Mat& m = snapped.params.values[i];
        out << snapped.params.names[i] << " " << m.rows << " " << m.cols << "\n";
    }
    out << "blob " << snapped.params.scalar_count() << "\n";
    for (const auto& m : snapped.params.values) {
        for (double v : m.a) {
            const float f = static_cast<float>(v);
            out.write(reinterpret_cast<const char*>(&f), sizeof(float));
        }
    }
    if (!out) throw std::runtime_error("checkpoint_save: write failed for " + path);
}

GinModel checkpoint_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint_load: cannot open " + path);
    std::string line;
    auto next_line = [&]() {
        if (!std::getline(in, line)) throw std::runtime_error("checkpoint_load: truncated header");
        return line;
    };
    if (next_line() != "uqq-ckpt-v1")
        throw std::runtime_error("checkpoint_load: bad magic in " + path);

    GinModel model;
    model.params = ParamStore{};
    std::size_t tensor_count = 0;
    std::vector<std::pair<std::string, std::pair<int, int>>> shapes;
    std::size_t blob_count = 0;

    auto expect_kv = [&](const std::string& key) {
        std::istringstream ss(next_line());
        std::string k;
        ss >> k;
        if (k != key) throw std::runtime_error("checkpoint_load: expected '" + key + "'");
        return ss;
    };

    { auto ss = expect_kv("k"); ss >> model.k; }
    { auto ss = expect_kv("p"); ss >> model.p; }
    { auto ss = expect_kv("hidden"); ss >> model.hidden; }
    { auto ss = expect_kv("layers"); ss >> model.layers; }
    { auto ss = expect_kv("heads"); ss >> model.heads; }
    { auto ss = expect_kv("clamp"); ss >> model.clamp_lo >> model.clamp_hi; }
    { auto ss = expect_kv("u_med"); ss >> model.u_med; }
    { auto ss = expect_kv("u_iqr"); ss >> model.u_iqr; }
    { auto ss = expect_kv("tensors"); ss >> tensor_count; }
    for (std::size_t i = 0; i < tensor_count; ++i) {
        std::istringstream ss(next_line());
        std::string name;
        int rows = 0, cols = 0;
        if (!(ss >> name >> rows >> cols) || rows < 1 || cols < 1)
            throw std::runtime_error("checkpoint_load: bad tensor entry");
        shapes.emplace_back(name, std::make_pair(rows, cols));
    }
    { auto ss = expect_kv("blob"); ss >> blob_count; }

    std::size_t expected = 0;
    for (const auto& [name, shape] : shapes)
        expected += static_cast<std::size_t>(shape.first) * shape.second;
    if (expected != blob_count)
        throw std::runtime_error("checkpoint_load: tensor table does not match blob size");

    for (const auto& [name, shape] : shapes) {
        Mat m(shape.first, shape.second);
        for (double& v : m.a) {
            float f = 0.0f;
            in.read(reinterpret_cast<char*>(&f), sizeof(float));
            if (!in) throw std::runtime_error("checkpoint_load: truncated blob in " + path);
            v = static_cast<double>(f);
        }
        model.params.add(name, std::move(m));
    }
    char extra = 0;
    if (in.read(&extra, 1))
        throw std::runtime_error("checkpoint_load: trailing bytes in " + path);
    return model;
}

}  // namespace uqq
