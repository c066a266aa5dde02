// kn_oracle.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Brute-force interpolated modified Kneser-Ney over string n-grams. Counts
// are taken straight from the padded sentences and every conditional is
// evaluated by the textbook recursion, with no back-off tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "corpsim/corpus.hpp"

namespace corpsim::testing {

class KnOracle {
 public:
  using Gram = std::vector<std::string>;

  KnOracle(const Corpus& corpus, int order) : order_(order), counts_(order + 1) {
    std::set<std::string> words;
    for (const auto& s : corpus.sentences()) {
      Gram padded(order - 1, "<s>");
      padded.insert(padded.end(), s.begin(), s.end());
      padded.push_back("</s>");
      for (std::size_t i = order - 1; i < padded.size(); ++i)
        for (int k = 1; k <= order; ++k)
          ++counts_[k][Gram(padded.begin() + (i + 1 - k), padded.begin() + (i + 1))];
      words.insert(s.begin(), s.end());
    }
    events_.assign(words.begin(), words.end());
    events_.push_back("</s>");
    events_.push_back("<unk>");

    // Count used at order k: raw at the top, distinct left extensions below.
    adjusted_.resize(order + 1);
    adjusted_[order] = counts_[order];
    for (int k = 1; k < order; ++k) {
      for (const auto& [g, c] : counts_[k + 1]) {
        if (c > 0) ++adjusted_[k][Gram(g.begin() + 1, g.end())];
      }
    }
    discounts_.resize(order + 1);
    for (int k = 1; k <= order; ++k) {
      std::array<double, 5> n{};
      for (const auto& [g, a] : adjusted_[k])
        if (a >= 1 && a <= 4) n[a] += 1;
      discounts_[k] = discounts(n);
    }
  }

  // Modified KN discounts D1, D2, D3+ from n1..n4 (n[0] unused).
  static std::array<double, 3> discounts(const std::array<double, 5>& n) {
    std::array<double, 3> d{0.5, 1.0, 1.5};
    const auto clamp = [](double v, double hi) {
      return std::min(std::max(v, 1e-6), std::nextafter(hi, 0.0));
    };
    if (n[1] == 0 || n[2] == 0) return d;
    const double y = n[1] / (n[1] + 2 * n[2]);
    d[0] = clamp(1 - 2 * y * n[2] / n[1], 1.0);
    if (n[3] == 0) return d;
    d[1] = clamp(2 - 3 * y * n[3] / n[2], 2.0);
    if (n[4] == 0) return d;
    d[2] = clamp(3 - 4 * y * n[4] / n[3], 3.0);
    return d;
  }

  // p(w | h) with |h| == order - 1 (shorter histories use a lower order).
  double prob(const Gram& history, const std::string& w) const {
    return p(static_cast<int>(history.size()) + 1, history, w);
  }

  const std::vector<std::string>& events() const { return events_; }
  const std::array<double, 3>& discounts_at(int k) const { return discounts_[k]; }

 private:
  double p(int k, const Gram& h, const std::string& w) const {
    if (k == 0) return 1.0 / static_cast<double>(events_.size());
    const Gram shorter(h.begin() + (h.empty() ? 0 : 1), h.end());
    double total = 0;
    std::array<double, 3> classes{};
    for (const auto& v : events_) {
      const double a = count(k, h, v);
      total += a;
      if (a >= 1) classes[std::min(a, 3.0) - 1] += 1;
    }
    if (total == 0) return p(k - 1, shorter, w);
    const auto& d = discounts_[k];
    const auto disc = [&](double a) { return a == 0 ? 0.0 : a == 1 ? d[0] : a == 2 ? d[1] : d[2]; };
    const double a = count(k, h, w);
    const double gamma = (d[0] * classes[0] + d[1] * classes[1] + d[2] * classes[2]) / total;
    return std::max(a - disc(a), 0.0) / total + gamma * p(k - 1, shorter, w);
  }

  double count(int k, const Gram& h, const std::string& w) const {
    Gram g = h;
    g.push_back(w);
    const auto it = adjusted_[k].find(g);
    return it == adjusted_[k].end() ? 0.0 : static_cast<double>(it->second);
  }

  int order_;
  std::vector<std::map<Gram, long>> counts_;
  std::vector<std::map<Gram, long>> adjusted_;
  std::vector<std::array<double, 3>> discounts_;
  std::vector<std::string> events_;
};

// Every history in {<s>, words..., <unk>}^len.
inline std::vector<KnOracle::Gram> all_histories(const KnOracle& oracle, int len) {
  std::vector<std::string> symbols{"<s>", "<unk>"};
  for (const auto& e : oracle.events())
    if (e != "</s>" && e != "<unk>") symbols.push_back(e);
  std::vector<KnOracle::Gram> out{{}};
  for (int i = 0; i < len; ++i) {
    std::vector<KnOracle::Gram> next;
    for (const auto& g : out)
      for (const auto& s : symbols) {
        auto h = g;
        h.push_back(s);
        next.push_back(std::move(h));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace corpsim::testing
