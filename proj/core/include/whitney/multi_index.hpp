#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace whitney {

/// Exponent vector alpha in N^n.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }
  static MultiIndex unit(int n, int i);

  int size() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exponents_; }

  /// alpha! = prod alpha_i!
  std::int64_t factorial() const;

  /// Componentwise alpha <= beta.
  bool divides(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  MultiIndex operator-(const MultiIndex& other) const;

  /// Concatenation (alpha, beta) in N^{k+l}.
  MultiIndex concat(const MultiIndex& other) const;

  std::string to_string() const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded-lexicographic order: total degree first, then larger leading exponents first.
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

/// Dense enumeration of {alpha in N^n : |alpha| <= p} in graded-lex order, with the
/// Leibniz product table used by truncated jet multiplication.
class IndexSet {
 public:
  struct Product {
    std::uint32_t left;
    std::uint32_t right;
    std::uint32_t result;
    std::int64_t leibniz;  // gamma! / (alpha! beta!)
  };

  IndexSet(int n, int p);

  int dim() const { return n_; }
  int order() const { return p_; }
  std::size_t size() const { return list_.size(); }
  const MultiIndex& operator[](std::size_t k) const { return list_[k]; }
  const std::vector<MultiIndex>& list() const { return list_; }

  std::optional<std::size_t> find(const MultiIndex& alpha) const;
  std::size_t index_of(const MultiIndex& alpha) const;

  std::int64_t factorial(std::size_t k) const { return factorials_[k]; }
  const std::vector<Product>& products() const { return products_; }

  /// Position of the first multi-index of the given degree.
  std::size_t degree_begin(int degree) const { return degree_begin_[static_cast<std::size_t>(degree)]; }

 private:
  int n_;
  int p_;
  std::vector<MultiIndex> list_;
  std::vector<std::int64_t> factorials_;
  std::vector<std::int32_t> table_;  // dense (p+1)^n lookup
  std::vector<std::size_t> degree_begin_;
  std::vector<Product> products_;
};

/// Shared, cached index set for (n, p).
std::shared_ptr<const IndexSet> index_set(int n, int p);

/// Binomial coefficient C(n, k) as int64 (small arguments only).
std::int64_t binomial(int n, int k);

}  // namespace whitney
