#pragma once

#include "fnmr/common.hpp"
#include "fnmr/distance.hpp"
#include "fnmr/embed.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fnmr {

/// Row i lists every other point ordered by ascending distance from i
/// (ties by ascending index). Stored as an n x (n-1) integer matrix.
struct RankTable {
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> order;

  Index size() const { return order.rows(); }
};

RankTable rank_table(const DistanceMatrix& d);

/// Co-ranking summary curves.
///
/// `overlap(g-1)` is the integer sum over points of |N_g^ref(i) ∩ N_g^emb(i)|
/// for g = 1..n-1. Q_RX(g) = overlap / (g n) and
/// R_NX(g) = ((n-1) Q_RX(g) - g) / (n-1-g) for g = 1..n-2.
struct QualityCurve {
  std::vector<std::int64_t> overlap;  // g = 1..n-1
  Vector qrx;                         // g = 1..n-1
  Vector rnx;                         // g = 1..n-2
  int g_max = 1;                      // argmax R_NX, first on ties (1-based)
  Metric metric = Metric::direct;
  Space space = Space::function;

  Index n() const { return qrx.size() + 1; }
};

/// Incremental overlap counting, O(n^2) after ranking.
QualityCurve rnx_curve(const RankTable& ref, const RankTable& emb);

enum class AucForm {
  weighted,  // sum R_NX(g)/g / sum 1/g; equals 1 for a perfect embedding
  literal,   // sum R_NX(g)   / sum 1/g; the unweighted variant
};

double auc_rnx(const QualityCurve& curve, AucForm form = AucForm::weighted);

struct LocalGlobal {
  double q_local;
  double q_global;
};

/// Means of Q_RX on either side of g_max (both ranges include g_max).
LocalGlobal q_local_global(const QualityCurve& curve);

struct QualityReport {
  double auc = 0.0;
  double q_local = 0.0;
  double q_global = 0.0;
  QualityCurve curve;
  Metric metric = Metric::direct;
  Space space = Space::function;
  int geodesic_k = 0;
  std::string embedding_id;
};

/// Precomputed reference-space neighborhoods, reusable across embeddings.
struct ReferenceRanks {
  RankTable ranks;
  Metric metric = Metric::direct;
  Space space = Space::function;
  int geodesic_k = 0;
};

/// Ranks of `ref_d` itself (dir) or of its k-NN geodesic distances (geo).
ReferenceRanks reference_ranks(const DistanceMatrix& ref_d, Metric m, int geodesic_k, int workers = 1);

QualityReport evaluate_embedding(const ReferenceRanks& ref, const Embedding& emb);

/// Same as above with the embedding's own rank table already computed.
QualityReport evaluate_ranks(const ReferenceRanks& ref, const RankTable& emb_ranks);

RankTable embedding_ranks(const Embedding& emb);

QualityReport evaluate_embedding(const DistanceMatrix& ref_d, const Embedding& emb, Metric m,
                                 int geodesic_k);

}  // namespace fnmr
