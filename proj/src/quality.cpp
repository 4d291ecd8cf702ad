#include "fnmr/quality.hpp"

#include <algorithm>
#include <numeric>

namespace fnmr {

RankTable rank_table(const DistanceMatrix& d) {
  const Index n = d.size();
  require(n >= 2, "rank_table: need at least two points");
  RankTable t;
  t.order.resize(n, n - 1);
  std::vector<std::int32_t> idx(n - 1);
  for (Index i = 0; i < n; ++i) {
    std::int32_t c = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) idx[c++] = static_cast<std::int32_t>(j);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::int32_t a, std::int32_t b) { return d(i, a) < d(i, b); });
    for (Index j = 0; j < n - 1; ++j) t.order(i, j) = idx[j];
  }
  return t;
}

QualityCurve rnx_curve(const RankTable& ref, const RankTable& emb) {
  const Index n = ref.size();
  require(emb.size() == n, "rnx_curve: rank tables differ in size");
  require(n >= 4, "rnx_curve: need at least four points");
  QualityCurve c;
  c.overlap.assign(n - 1, 0);
  std::vector<char> in_ref(n), in_emb(n);
  for (Index i = 0; i < n; ++i) {
    std::fill(in_ref.begin(), in_ref.end(), 0);
    std::fill(in_emb.begin(), in_emb.end(), 0);
    std::int64_t overlap = 0;
    for (Index g = 0; g < n - 1; ++g) {
      const auto a = ref.order(i, g);
      const auto b = emb.order(i, g);
      in_ref[a] = 1;
      if (in_emb[a]) ++overlap;
      in_emb[b] = 1;
      if (in_ref[b]) ++overlap;
      c.overlap[g] += overlap;
    }
  }
  const double nd = static_cast<double>(n);
  c.qrx.resize(n - 1);
  for (Index g = 1; g <= n - 1; ++g)
    c.qrx(g - 1) = static_cast<double>(c.overlap[g - 1]) / (static_cast<double>(g) * nd);
  c.rnx.resize(n - 2);
  for (Index g = 1; g <= n - 2; ++g) {
    const double gd = static_cast<double>(g);
    c.rnx(g - 1) = ((nd - 1.0) * c.qrx(g - 1) - gd) / (nd - 1.0 - gd);
  }
  Index best = 0;
  for (Index g = 1; g < c.rnx.size(); ++g)
    if (c.rnx(g) > c.rnx(best)) best = g;
  c.g_max = static_cast<int>(best + 1);
  return c;
}

double auc_rnx(const QualityCurve& curve, AucForm form) {
  double num = 0.0;
  double den = 0.0;
  for (Index g = 1; g <= curve.rnx.size(); ++g) {
    const double inv = 1.0 / static_cast<double>(g);
    num += form == AucForm::weighted ? curve.rnx(g - 1) * inv : curve.rnx(g - 1);
    den += inv;
  }
  return num / den;
}

LocalGlobal q_local_global(const QualityCurve& curve) {
  const Index n = curve.n();
  const int gm = curve.g_max;
  const double local = curve.qrx.head(gm).sum() / static_cast<double>(gm);
  const double global = curve.qrx.segment(gm - 1, n - gm).sum() / static_cast<double>(n - gm);
  return {local, global};
}

ReferenceRanks reference_ranks(const DistanceMatrix& ref_d, Metric m, int geodesic_k, int workers) {
  ReferenceRanks r;
  r.metric = m;
  r.space = ref_d.space;
  if (m == Metric::geodesic) {
    r.geodesic_k = geodesic_k;
    r.ranks = rank_table(geodesic_from_direct(ref_d, geodesic_k, workers));
  } else {
    r.ranks = rank_table(ref_d);
  }
  return r;
}

RankTable embedding_ranks(const Embedding& emb) {
  require(emb.coords.allFinite(), "evaluate_embedding: non-finite embedding");
  return rank_table(pairwise_direct(emb.coords, std::nullopt, Space::embedding));
}

QualityReport evaluate_ranks(const ReferenceRanks& ref, const RankTable& emb_ranks) {
  require(emb_ranks.size() == ref.ranks.size(), "evaluate_embedding: size mismatch");
  QualityReport rep;
  rep.curve = rnx_curve(ref.ranks, emb_ranks);
  rep.curve.metric = ref.metric;
  rep.curve.space = ref.space;
  rep.auc = auc_rnx(rep.curve);
  const LocalGlobal lg = q_local_global(rep.curve);
  rep.q_local = lg.q_local;
  rep.q_global = lg.q_global;
  rep.metric = ref.metric;
  rep.space = ref.space;
  rep.geodesic_k = ref.geodesic_k;
  return rep;
}

QualityReport evaluate_embedding(const ReferenceRanks& ref, const Embedding& emb) {
  require(emb.size() == ref.ranks.size(), "evaluate_embedding: size mismatch");
  QualityReport rep = evaluate_ranks(ref, embedding_ranks(emb));
  rep.embedding_id = std::string(to_string(emb.method)) + " " + describe(emb.hyper);
  return rep;
}

QualityReport evaluate_embedding(const DistanceMatrix& ref_d, const Embedding& emb, Metric m,
                                 int geodesic_k) {
  require(ref_d.metric == Metric::direct, "evaluate_embedding: reference must be direct distances");
  return evaluate_embedding(reference_ranks(ref_d, m, geodesic_k), emb);
}

}  // namespace fnmr
