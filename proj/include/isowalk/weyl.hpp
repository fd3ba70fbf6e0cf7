#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "isowalk/errors.hpp"
#include "isowalk/root_system.hpp"

namespace isowalk {

struct WeylElement {
  std::vector<int> matrix;  // row-major, acts on coweight coordinates
  int length = 0;
  std::vector<int> word;    // reduced word, s_{word[0]} ... s_{word[last]}
};

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// The finite Weyl group W_0 enumerated by breadth-first search.
class WeylGroup {
 public:
  static constexpr std::size_t kDefaultCap = 2000000;

  explicit WeylGroup(const RootSystem& rs, std::size_t cap = kDefaultCap) : n_(rs.rank()) {
    if (static_cast<unsigned long long>(rs.weyl_order()) > cap)
      throw BudgetError("Weyl group of " + rs.name() + " has order " + std::to_string(rs.weyl_order()) +
                        ", above the enumeration cap " + std::to_string(cap));
    std::vector<std::vector<int>> gens;
    for (int i = 0; i < n_; ++i) {
      std::vector<int> m(n_ * n_, 0);
      for (int r = 0; r < n_; ++r) m[r * n_ + r] = 1;
      const Coweight& a = rs.simple_coroot(i);
      for (int r = 0; r < n_; ++r) m[r * n_ + i] -= a[r];
      gens.push_back(std::move(m));
    }
    WeylElement id;
    id.matrix.assign(n_ * n_, 0);
    for (int r = 0; r < n_; ++r) id.matrix[r * n_ + r] = 1;
    std::unordered_map<std::vector<int>, std::size_t, VecHash> seen;
    seen.emplace(id.matrix, 0);
    elements_.push_back(id);
    std::size_t head = 0;
    while (head < elements_.size()) {
      const std::size_t cur = head++;
      for (int i = 0; i < n_; ++i) {
        std::vector<int> m = multiply(gens[i], elements_[cur].matrix);
        if (seen.count(m)) continue;
        if (elements_.size() >= cap)
          throw BudgetError("Weyl group of " + rs.name() + " exceeds enumeration cap " + std::to_string(cap));
        WeylElement w;
        w.matrix = m;
        w.length = elements_[cur].length + 1;
        w.word.push_back(i);
        w.word.insert(w.word.end(), elements_[cur].word.begin(), elements_[cur].word.end());
        seen.emplace(std::move(m), elements_.size());
        elements_.push_back(std::move(w));
      }
    }
    longest_ = 0;
    for (std::size_t k = 0; k < elements_.size(); ++k)
      if (elements_[k].length > elements_[longest_].length) longest_ = k;
    star_.assign(n_, -1);
    for (int j = 0; j < n_; ++j) {
      Coweight e(n_, 0);
      e[j] = 1;
      Coweight s = -apply(longest_, e);
      for (int k = 0; k < n_; ++k)
        if (s[k] == 1) star_[j] = k;
    }
  }

  std::size_t size() const { return elements_.size(); }
  const WeylElement& operator[](std::size_t k) const { return elements_[k]; }
  const std::vector<WeylElement>& elements() const { return elements_; }
  std::size_t longest() const { return longest_; }
  int rank() const { return n_; }

  Coweight apply(std::size_t k, const Coweight& c) const {
    Coweight out(n_, 0);
    const std::vector<int>& m = elements_[k].matrix;
    for (int r = 0; r < n_; ++r)
      for (int s = 0; s < n_; ++s) out[r] += m[r * n_ + s] * c[s];
    return out;
  }
  // λ* = -w_0 λ
  Coweight star(const Coweight& c) const { return -apply(longest_, c); }
  int star_index(int j) const { return star_[j]; }

  // elements fixing c
  std::vector<std::size_t> stabilizer(const Coweight& c) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < elements_.size(); ++k)
      if (apply(k, c) == c) out.push_back(k);
    return out;
  }

 private:
  std::vector<int> multiply(const std::vector<int>& a, const std::vector<int>& b) const {
    std::vector<int> c(n_ * n_, 0);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        int x = a[i * n_ + k];
        if (!x) continue;
        for (int j = 0; j < n_; ++j) c[i * n_ + j] += x * b[k * n_ + j];
      }
    return c;
  }

  int n_;
  std::vector<WeylElement> elements_;
  std::size_t longest_ = 0;
  std::vector<int> star_;
};

}  // namespace isowalk
