#pragma once

#include "fnmr/common.hpp"
#include "fnmr/distance.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fnmr {

enum class Method { mds, isomap, diffmap, tsne, umap };
enum class UmapInit { spectral, random };

std::string_view to_string(Method m);
std::string_view to_string(UmapInit i);
Method parse_method(std::string_view s);
UmapInit parse_umap_init(std::string_view s);
const std::vector<Method>& all_methods();

/// Hyperparameters for every method. Only the fields belonging to `method`
/// are meaningful; `dim` is the target dimension (k for MDS, ndim for
/// ISOMAP, neigen for DIFFMAP, dims for t-SNE, n_components for UMAP).
struct HyperParams {
  Method method = Method::mds;
  int dim = 2;

  int k = 10;  // isomap neighbors

  double eps_val = 1.0;  // diffmap kernel width
  int t = 1;             // diffmap diffusion time

  double perplexity = 30.0;
  double theta = 0.0;  // accepted for compatibility; gradients are always exact
  int max_iter = 1000;
  double eta = 200.0;
  double exaggeration = 12.0;

  int n_neighbors = 15;
  double min_dist = 0.1;
  int n_epochs = 200;
  UmapInit init = UmapInit::spectral;

  bool operator==(const HyperParams&) const = default;
};

/// Human-readable "name=value" list of the method's own fields.
std::string describe(const HyperParams& h);

struct Embedding {
  Matrix coords;  // n x dim
  Method method = Method::mds;
  HyperParams hyper;
  Seed seed = 0;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;

  Index size() const { return coords.rows(); }
  Index dim() const { return coords.cols(); }
};

/// Classical MDS: top `dim` eigenpairs of the double-centred squared
/// distances. Columns beyond the number of positive eigenvalues are zero
/// and produce a warning.
Embedding mds(const DistanceMatrix& d, int dim);

/// MDS on shortest-path distances of the symmetrized k-NN graph.
Embedding isomap(const DistanceMatrix& d, int k, int ndim, int workers = 1);

/// Row-stochastic diffusion operator P = Dg^{-1} K with K = exp(-d^2/eps).
Matrix diffusion_operator(const DistanceMatrix& d, double eps_val);

/// Diffusion map coordinates lambda_j^t psi_j, j = 1..neigen, skipping the
/// trivial constant eigenvector. `diagnostics` carries every eigenvalue as
/// "lambda_j" for j = 0..neigen.
Embedding diffusion_map(const DistanceMatrix& d, double eps_val, int t, int neigen);

struct TsneParams {
  double perplexity = 30.0;
  int dims = 2;
  int max_iter = 1000;
  double eta = 200.0;
  double exaggeration = 12.0;
  double theta = 0.0;
};

/// Exact t-SNE with Gaussian input affinities on the supplied distances.
Embedding tsne(const DistanceMatrix& d, const TsneParams& p, Seed seed);

struct UmapParams {
  int n_neighbors = 15;
  int n_components = 2;
  double min_dist = 0.1;
  int n_epochs = 200;
  UmapInit init = UmapInit::spectral;
};

Embedding umap_fit(const DistanceMatrix& d, const UmapParams& p, Seed seed);

/// Dispatches on `h.method`.
Embedding fit_embedding(const DistanceMatrix& d, const HyperParams& h, Seed seed, int workers = 1);

/// Exposed building blocks, used by the tests for oracle checks.
namespace tsne_detail {

struct Calibration {
  Matrix conditional;      // row i holds p_{j|i}
  Vector beta;             // precision 1/(2 sigma_i^2) per row
  Vector entropy_bits;     // Shannon entropy of each row
  double max_residual = 0; // max_i |log2(perplexity) - H_i|
};

/// Conditional probabilities of row i for precision beta on squared distances.
Vector conditional_row(const Matrix& d2, Index i, double beta);

/// Per-row bisection on beta so that 2^H = perplexity.
Calibration calibrate(const DistanceMatrix& d, double perplexity);

/// (P + P^T) / (2n).
Matrix symmetrize(const Matrix& conditional);

double kl_divergence(const Matrix& p, const Matrix& y);
Matrix kl_gradient(const Matrix& p, const Matrix& y);

}  // namespace tsne_detail

namespace umap_detail {

struct SmoothKnn {
  Matrix membership;     // directed memberships, row i over its neighbors
  Vector rho;
  Vector sigma;
  Vector residual;       // |sum_j exp(...) - log2(k)| per point
};

SmoothKnn smooth_knn(const DistanceMatrix& d, int n_neighbors);

/// w1 + w2 - w1 w2, elementwise.
Matrix fuzzy_union(const Matrix& directed);

struct CurveParams {
  double a;
  double b;
};

/// Least-squares fit of 1/(1 + a x^{2b}) to the min_dist-offset
/// exponential on 300 points of [0, 3].
CurveParams fit_curve(double min_dist, double spread = 1.0);

}  // namespace umap_detail

}  // namespace fnmr
