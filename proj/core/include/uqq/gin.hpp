#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uqq/autodiff.hpp"
#include "uqq/graph.hpp"
#include "uqq/spectral.hpp"

namespace uqq {

/// Per-graph Gaussian over the flattened angles.
struct GaussianPrediction {
    std::vector<double> mu;   // 2p
    std::vector<double> var;  // 2p, in [e^-5, e^2] by the log-variance clamp
};

struct ParamStore {
    std::vector<std::string> names;
    std::vector<Mat> values;

    int add(const std::string& name, Mat value);
    int index_of(const std::string& name) const;  // -1 if absent
    std::size_t scalar_count() const;
};

/// Three message-passing blocks (learnable self-weight + 2-layer MLP +
/// LayerNorm), mean||max pooling to a 2*hidden embedding, and linear
/// Gaussian heads with the log-variance clamped to [-5, 2]. heads == 1
/// drops the variance head (the deterministic point-prediction baseline).
struct GinModel {
    int k = 6;        // positional-encoding columns; features are k+1 wide
    int p = 2;        // circuit depth (heads output 2p values)
    int hidden = 64;
    int layers = 3;
    int heads = 2;
    double clamp_lo = -5.0;
    double clamp_hi = 2.0;

    // calibration constants carried in the checkpoint header
    double u_med = 0.0;
    double u_iqr = 1.0;

    ParamStore params;

    int feature_dim() const { return k + 1; }
    int embed_dim() const { return 2 * hidden; }
};

/// Fresh model with fan-scaled uniform initialization (seeded).
GinModel init_model(int k, int p, int hidden, int heads, std::uint64_t seed);

/// Row-normalized adjacency with self-loops, as a dense matrix.
Mat normalized_adjacency(const Graph& g);

/// Node features as a Mat (column 0 normalized degree, then the encoding).
Mat feature_matrix(const Graph& g, const SpectralEncoding& enc);

/// Degree-only features (the k = 0 ablation drops the encoding columns).
Mat degree_feature_matrix(const Graph& g);

struct ForwardIds {
    Tape::Id mu = -1;
    Tape::Id logvar = -1;  // -1 when heads == 1
    Tape::Id embedding = -1;
};

/// Emits one tape leaf per parameter; reused by every graph in the batch.
std::vector<Tape::Id> emit_params(Tape& tape, const GinModel& model);

/// Builds the forward pass for one graph on the tape.
ForwardIds gin_forward(Tape& tape, const GinModel& model, const std::vector<Tape::Id>& pids,
                       const Mat& features, const Mat& a_hat);

/// Inference convenience: fixed-sign encoding, no gradient use.
GaussianPrediction predict(const GinModel& model, const Graph& g);
GaussianPrediction predict(const GinModel& model, const Mat& features, const Mat& a_hat,
                           std::vector<double>* embedding_out = nullptr);

/// Checkpoint: text header (architecture, clamp bounds, calibration
/// constants, tensor table) followed by a little-endian float32 blob.
/// Weights are snapped to the float32 grid on save, so save -> load
/// reproduces forward outputs bit-exactly for toolkit-trained models.
void checkpoint_save(const GinModel& model, const std::string& path);
GinModel checkpoint_load(const std::string& path);

/// Rounds every weight through float32; training calls this before
/// returning so the in-memory model equals its checkpoint.
void snap_to_float32(GinModel& model);

}  // namespace uqq
