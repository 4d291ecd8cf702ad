#include "fnmr/embed.hpp"

#include "fnmr/eigen_utils.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace fnmr {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::mds: return "mds";
    case Method::isomap: return "isomap";
    case Method::diffmap: return "diffmap";
    case Method::tsne: return "tsne";
    case Method::umap: return "umap";
  }
  return "?";
}

std::string_view to_string(UmapInit i) { return i == UmapInit::spectral ? "spectral" : "random"; }

Method parse_method(std::string_view s) {
  for (Method m : all_methods())
    if (to_string(m) == s) return m;
  if (s == "t-sne") return Method::tsne;
  throw Error("unknown method '" + std::string(s) + "'");
}

UmapInit parse_umap_init(std::string_view s) {
  if (s == "spectral") return UmapInit::spectral;
  if (s == "random") return UmapInit::random;
  throw Error("unknown umap init '" + std::string(s) + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::mds, Method::isomap, Method::diffmap,
                                              Method::tsne, Method::umap};
  return methods;
}

std::string describe(const HyperParams& h) {
  std::ostringstream os;
  os.precision(17);
  switch (h.method) {
    case Method::mds: os << "k=" << h.dim; break;
    case Method::isomap: os << "k=" << h.k << " ndim=" << h.dim; break;
    case Method::diffmap: os << "eps.val=" << h.eps_val << " neigen=" << h.dim << " t=" << h.t; break;
    case Method::tsne:
      os << "perplexity=" << h.perplexity << " dims=" << h.dim << " theta=" << h.theta
         << " max_iter=" << h.max_iter << " eta=" << h.eta << " exaggeration=" << h.exaggeration;
      break;
    case Method::umap:
      os << "n_neighbors=" << h.n_neighbors << " n_components=" << h.dim
         << " min_dist=" << h.min_dist << " n_epochs=" << h.n_epochs
         << " init=" << to_string(h.init);
      break;
  }
  return os.str();
}

Embedding mds(const DistanceMatrix& d, int dim) {
  const Index n = d.size();
  require(n >= 2, "mds: need at least two points");
  require(dim >= 1 && dim <= n - 1, "mds: dim must lie in [1, n-1]");
  require(d.d.allFinite(), "mds: non-finite distances");

  const SymmetricEigen eig = symmetric_eigen(double_center_squared(d.d));
  // Eigenvalues below this are treated as zero.
  const double tol = std::max(1e-10, 1e-12 * std::abs(eig.values(0)));

  Embedding out;
  out.method = Method::mds;
  out.hyper.method = Method::mds;
  out.hyper.dim = dim;
  Matrix vecs = eig.vectors.leftCols(dim);
  fix_column_signs(vecs);
  out.coords.resize(n, dim);
  int positive = 0;
  for (int j = 0; j < dim; ++j) {
    const double lambda = eig.values(j);
    out.diagnostics["eigenvalue_" + std::to_string(j)] = lambda;
    if (lambda > tol) {
      out.coords.col(j) = vecs.col(j) * std::sqrt(lambda);
      ++positive;
    } else {
      out.coords.col(j).setZero();
    }
  }
  out.diagnostics["positive_eigenvalues"] = positive;
  if (positive < dim)
    out.warnings.push_back("mds: only " + std::to_string(positive) +
                           " positive eigenvalues; remaining columns are zero");
  return out;
}

Embedding isomap(const DistanceMatrix& d, int k, int ndim, int workers) {
  const DistanceMatrix geo = geodesic_from_direct(d, k, workers);
  Embedding out = mds(geo, ndim);
  out.method = Method::isomap;
  out.hyper.method = Method::isomap;
  out.hyper.k = k;
  out.hyper.dim = ndim;
  out.diagnostics["bridged_edges"] = geo.bridged_edges;
  return out;
}

Embedding fit_embedding(const DistanceMatrix& d, const HyperParams& h, Seed seed, int workers) {
  Embedding out;
  switch (h.method) {
    case Method::mds: out = mds(d, h.dim); break;
    case Method::isomap: out = isomap(d, h.k, h.dim, workers); break;
    case Method::diffmap: out = diffusion_map(d, h.eps_val, h.t, h.dim); break;
    case Method::tsne:
      out = tsne(d, {h.perplexity, h.dim, h.max_iter, h.eta, h.exaggeration, h.theta}, seed);
      break;
    case Method::umap:
      out = umap_fit(d, {h.n_neighbors, h.dim, h.min_dist, h.n_epochs, h.init}, seed);
      break;
  }
  out.hyper = h;
  out.seed = seed;
  return out;
}

}  // namespace fnmr
