#include "whitney/multi_index.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

#include "whitney/error.hpp"

namespace whitney {
namespace {

std::int64_t small_factorial(int k) {
  std::int64_t out = 1;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

void enumerate_degree(int n, int degree, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  const int slot = static_cast<int>(prefix.size());
  if (slot == n - 1) {
    prefix.push_back(degree);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    prefix.push_back(e);
    enumerate_degree(n, degree - e, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) fail(ErrorCode::kShapeMismatch, "negative exponent in multi-index");
    degree_ += e;
  }
}

MultiIndex MultiIndex::unit(int n, int i) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return MultiIndex(std::move(e));
}

std::int64_t MultiIndex::factorial() const {
  std::int64_t out = 1;
  for (int e : exponents_) out *= small_factorial(e);
  return out;
}

bool MultiIndex::divides(const MultiIndex& other) const {
  if (other.size() != size()) return false;
  for (int i = 0; i < size(); ++i) {
    if ((*this)[i] > other[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.size() != size()) fail(ErrorCode::kShapeMismatch, "multi-index length mismatch");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (other.size() != size()) fail(ErrorCode::kShapeMismatch, "multi-index length mismatch");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.exponents_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::concat(const MultiIndex& other) const {
  std::vector<int> e(exponents_);
  e.insert(e.end(), other.exponents_.begin(), other.exponents_.end());
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(exponents_[i]);
  }
  return out + ")";
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return a.exponents() > b.exponents();
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

IndexSet::IndexSet(int n, int p) : n_(n), p_(p) {
  if (n < 1 || p < 0) fail(ErrorCode::kShapeMismatch, "index set needs n >= 1 and p >= 0");
  std::size_t table_size = 1;
  for (int i = 0; i < n; ++i) {
    table_size *= static_cast<std::size_t>(p + 1);
    if (table_size > (1u << 22)) fail(ErrorCode::kShapeMismatch, "index set too large");
  }
  for (int d = 0; d <= p; ++d) {
    degree_begin_.push_back(list_.size());
    std::vector<int> prefix;
    enumerate_degree(n, d, prefix, list_);
  }
  degree_begin_.push_back(list_.size());

  table_.assign(table_size, -1);
  factorials_.reserve(list_.size());
  for (std::size_t k = 0; k < list_.size(); ++k) {
    std::size_t key = 0;
    for (int i = 0; i < n; ++i) key = key * static_cast<std::size_t>(p + 1) + static_cast<std::size_t>(list_[k][i]);
    table_[key] = static_cast<std::int32_t>(k);
    factorials_.push_back(list_[k].factorial());
  }

  for (std::size_t i = 0; i < list_.size(); ++i) {
    for (std::size_t j = 0; j < list_.size(); ++j) {
      if (list_[i].degree() + list_[j].degree() > p) continue;
      const MultiIndex sum = list_[i] + list_[j];
      std::int64_t leibniz = 1;
      for (int l = 0; l < n; ++l) leibniz *= binomial(sum[l], list_[i][l]);
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           static_cast<std::uint32_t>(index_of(sum)), leibniz});
    }
  }
}

std::optional<std::size_t> IndexSet::find(const MultiIndex& alpha) const {
  if (alpha.size() != n_ || alpha.degree() > p_) return std::nullopt;
  std::size_t key = 0;
  for (int i = 0; i < n_; ++i) key = key * static_cast<std::size_t>(p_ + 1) + static_cast<std::size_t>(alpha[i]);
  const auto k = table_[key];
  if (k < 0) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::size_t IndexSet::index_of(const MultiIndex& alpha) const {
  const auto k = find(alpha);
  if (!k) fail(ErrorCode::kShapeMismatch, "multi-index " + alpha.to_string() + " outside index set");
  return *k;
}

std::shared_ptr<const IndexSet> index_set(int n, int p) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const IndexSet>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, p}];
  if (!slot) slot = std::make_shared<const IndexSet>(n, p);
  return slot;
}

}  // namespace whitney
