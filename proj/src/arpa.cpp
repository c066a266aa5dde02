// arpa.cpp
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

#include "corpsim/arpa.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "corpsim/error.hpp"

namespace corpsim {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("expected a number, got '" + std::string(s) + "'", line);
  return v;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace

std::string export_arpa(const KNModel& model) {
  std::ostringstream out;
  const auto& vocab = model.vocab();
  std::vector<std::vector<std::pair<NGram, KNModel::Entry>>> sorted(model.order());
  for (int k = 1; k <= model.order(); ++k) {
    const auto& table = model.entries(k);
    sorted[k - 1].assign(table.begin(), table.end());
    std::sort(sorted[k - 1].begin(), sorted[k - 1].end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  out << "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k) out << "ngram " << k << '=' << sorted[k - 1].size() << '\n';
  for (int k = 1; k <= model.order(); ++k) {
    out << "\n\\" << k << "-grams:\n";
    for (const auto& [g, e] : sorted[k - 1]) {
      out << format_double(e.has_prob ? e.log10_prob : kArpaNoProb) << '\t';
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) out << ' ';
        out << vocab.word(g[i]);
      }
      if (k < model.order() && (e.log10_backoff != 0.0 || !e.has_prob))
        out << '\t' << format_double(e.log10_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
  return out.str();
}

KNModel import_arpa(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }

  std::size_t i = 0;
  const auto line_no = [&] { return i + 1; };
  while (i < lines.size() && strip(lines[i]) != "\\data\\") ++i;
  if (i == lines.size()) throw ParseError("missing \\data\\ header", 1);
  ++i;

  std::map<int, std::size_t> declared;
  for (; i < lines.size(); ++i) {
    const auto line = strip(lines[i]);
    if (line.empty()) continue;
    if (!line.starts_with("ngram ")) break;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("malformed ngram count line", line_no());
    int k = 0;
    std::size_t c = 0;
    const auto ks = strip(line.substr(6, eq - 6));
    const auto cs = strip(line.substr(eq + 1));
    if (std::from_chars(ks.data(), ks.data() + ks.size(), k).ec != std::errc() || k < 1 ||
        std::from_chars(cs.data(), cs.data() + cs.size(), c).ec != std::errc())
      throw ParseError("malformed ngram count line", line_no());
    if (!declared.emplace(k, c).second) throw ParseError("duplicate ngram count", line_no());
  }
  if (declared.empty()) throw ParseError("no ngram counts in \\data\\ section", line_no());
  const int order = declared.rbegin()->first;
  if (static_cast<int>(declared.size()) != order)
    throw ParseError("ngram counts must cover orders 1.." + std::to_string(order), line_no());

  LmVocabulary vocab;
  std::vector<KNModel::EntryTable> entries(order);
  std::vector<std::size_t> seen(order, 0);
  int current = 0;
  bool ended = false;
  for (; i < lines.size() && !ended; ++i) {
    const auto line = strip(lines[i]);
    if (line.empty()) continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.front() == '\\') {
      int k = 0;
      const auto dash = line.find("-grams:");
      if (dash == std::string_view::npos ||
          std::from_chars(line.data() + 1, line.data() + dash, k).ec != std::errc() || k < 1 ||
          k > order)
        throw ParseError("unexpected section header '" + std::string(line) + "'", line_no());
      if (k != current + 1) throw ParseError("sections out of order", line_no());
      current = k;
      continue;
    }
    if (current == 0) throw ParseError("n-gram entry outside a section", line_no());
    const auto fields = split_ws(line);
    const std::size_t k = static_cast<std::size_t>(current);
    if (fields.size() != k + 1 && fields.size() != k + 2)
      throw ParseError("expected " + std::to_string(k) + " words per entry", line_no());
    if (fields.size() == k + 2 && current == order)
      throw ParseError("highest-order entries carry no back-off", line_no());

    KNModel::Entry e;
    const double lp = parse_double(fields[0], line_no());
    e.has_prob = lp > kArpaNoProb;
    e.log10_prob = e.has_prob ? lp : 0.0;
    if (e.has_prob && lp > 0.0) throw ParseError("log probability above zero", line_no());
    if (fields.size() == k + 2) e.log10_backoff = parse_double(fields[k + 1], line_no());

    NGram g;
    for (std::size_t w = 1; w <= k; ++w) {
      if (current == 1) {
        g.push_back(vocab.add(fields[w]));
      } else {
        if (!vocab.contains(fields[w]))
          throw ParseError("word '" + std::string(fields[w]) + "' missing from unigrams", line_no());
        g.push_back(vocab.lookup(fields[w]));
      }
    }
    if (!entries[k - 1].emplace(std::move(g), e).second)
      throw ParseError("duplicate n-gram", line_no());
    ++seen[k - 1];
  }
  if (!ended) throw ParseError("missing \\end\\ marker", lines.size());
  for (int k = 1; k <= order; ++k) {
    if (seen[k - 1] != declared[k])
      throw ParseError("order " + std::to_string(k) + " declares " + std::to_string(declared[k]) +
                           " entries but has " + std::to_string(seen[k - 1]),
                       lines.size());
  }
  return KNModel(order, std::move(vocab), std::move(entries));
}

void write_arpa(const KNModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << export_arpa(model);
  if (!out) throw Error("write failed: " + path.string());
}

KNModel read_arpa(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return import_arpa(buf.str());
}

}  // namespace corpsim
