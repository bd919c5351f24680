#include "skcap/joint_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skcap/errors.hpp"

namespace skcap {

std::string_view to_string(Var v) {
  switch (v) {
    case Var::U:
      return "U";
    case Var::X:
      return "X";
    case Var::S:
      return "S";
    case Var::Yr:
      return "Yr";
    case Var::Ye:
      return "Ye";
  }
  return "?";
}

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

// Mixed-radix odometer over `shape`, last axis fastest.
bool advance(std::vector<std::size_t>& idx,
             const std::vector<std::size_t>& shape) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (++idx[k] < shape[k]) return true;
    idx[k] = 0;
  }
  return false;
}

void require_disjoint(std::span<const Var> a, std::span<const Var> b,
                      const char* what) {
  for (Var v : a) {
    if (std::find(b.begin(), b.end(), v) != b.end()) {
      throw ShapeError(std::string(what) + ": variable " +
                       std::string(to_string(v)) + " appears in two groups");
    }
  }
}

}  // namespace

JointPmf::JointPmf(std::vector<Var> labels, std::vector<std::size_t> shape,
                   std::vector<double> probs)
    : labels_(std::move(labels)),
      shape_(std::move(shape)),
      probs_(std::move(probs)) {
  if (labels_.size() != shape_.size()) {
    throw ShapeError("JointPmf: labels and shape differ in length");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (shape_[i] == 0) throw ShapeError("JointPmf: empty axis");
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i] == labels_[j]) {
        throw ShapeError("JointPmf: duplicate axis label " +
                         std::string(to_string(labels_[i])));
      }
    }
  }
  if (probs_.size() != product(shape_)) {
    throw ShapeError("JointPmf: probability tensor size does not match shape");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ProbabilityError("JointPmf: negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ProbabilityError("JointPmf: total mass differs from 1");
  }
}

std::size_t JointPmf::axis_of(Var v) const {
  auto it = std::find(labels_.begin(), labels_.end(), v);
  if (it == labels_.end()) {
    throw ShapeError("JointPmf: unknown label " + std::string(to_string(v)));
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

bool JointPmf::has(Var v) const {
  return std::find(labels_.begin(), labels_.end(), v) != labels_.end();
}

double JointPmf::at(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw ShapeError("JointPmf::at: rank");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= shape_[k]) throw ShapeError("JointPmf::at: out of range");
    flat = flat * shape_[k] + index[k];
  }
  return probs_[flat];
}

JointPmf marginalize(const JointPmf& joint, std::span<const Var> keep) {
  std::vector<std::size_t> axes;
  std::vector<std::size_t> out_shape;
  for (Var v : keep) {
    if (std::find(keep.begin(), keep.end(), v) != keep.begin() + axes.size()) {
      throw ShapeError("marginalize: duplicate label in keep list");
    }
    axes.push_back(joint.axis_of(v));
    out_shape.push_back(joint.shape()[axes.back()]);
  }
  std::vector<double> out(product(out_shape), 0.0);
  const auto& shape = joint.shape();
  std::vector<std::size_t> idx(shape.size(), 0);
  auto probs = joint.probs();
  std::size_t flat = 0;
  do {
    std::size_t o = 0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      o = o * out_shape[k] + idx[axes[k]];
    }
    out[o] += probs[flat++];
  } while (advance(idx, shape));
  return JointPmf(std::vector<Var>(keep.begin(), keep.end()),
                  std::move(out_shape), std::move(out));
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

double binary_entropy(double p) {
  const double q[2] = {p, 1.0 - p};
  return entropy_bits(q);
}

double entropy(const JointPmf& joint, std::span<const Var> vars) {
  return entropy_bits(marginalize(joint, vars).probs());
}

double conditional_mutual_information(const JointPmf& joint,
                                      std::span<const Var> a,
                                      std::span<const Var> b,
                                      std::span<const Var> c) {
  require_disjoint(a, b, "conditional_mutual_information");
  require_disjoint(a, c, "conditional_mutual_information");
  require_disjoint(b, c, "conditional_mutual_information");
  if (a.empty() || b.empty()) return 0.0;

  // Marginal over (A, B, C) with A, B, C flattened to single indices.
  std::vector<Var> order;
  order.insert(order.end(), a.begin(), a.end());
  order.insert(order.end(), b.begin(), b.end());
  order.insert(order.end(), c.begin(), c.end());
  const JointPmf abc = marginalize(joint, order);
  auto extent = [&](std::span<const Var> g) {
    std::size_t n = 1;
    for (Var v : g) n *= joint.shape()[joint.axis_of(v)];
    return n;
  };
  const std::size_t na = extent(a), nb = extent(b), nc = extent(c);
  auto p = abc.probs();

  std::vector<double> pac(na * nc, 0.0), pbc(nb * nc, 0.0), pc(nc, 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t k = 0; k < nc; ++k) {
        const double v = p[(i * nb + j) * nc + k];
        pac[i * nc + k] += v;
        pbc[j * nc + k] += v;
        pc[k] += v;
      }
    }
  }
  double info = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t k = 0; k < nc; ++k) {
        const double v = p[(i * nb + j) * nc + k];
        if (v <= 0.0) continue;
        info += v * std::log2(v * pc[k] / (pac[i * nc + k] * pbc[j * nc + k]));
      }
    }
  }
  return std::max(info, 0.0);
}

double mutual_information(const JointPmf& joint, std::span<const Var> a,
                          std::span<const Var> b) {
  return conditional_mutual_information(joint, a, b, {});
}

double mutual_information_2d(std::span<const double> table, std::size_t rows,
                             std::size_t cols) {
  std::vector<double> pr(rows, 0.0), pc(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      pr[i] += table[i * cols + j];
      pc[j] += table[i * cols + j];
    }
  }
  double info = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = table[i * cols + j];
      if (v > 0.0) info += v * std::log2(v / (pr[i] * pc[j]));
    }
  }
  return std::max(info, 0.0);
}

}  // namespace skcap
