/*
 * Copyright 2026 The bisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bisim/lts.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "bisim/tuple_index.hpp"

namespace bisim {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

LabelId Alphabet::intern(std::string_view text)
{
    std::string key(text);
    if (auto it = ids_.find(key); it != ids_.end())
        return it->second;
    const auto id = static_cast<LabelId>(texts_.size());
    texts_.push_back(key);
    ids_.emplace(std::move(key), id);
    return id;
}

LabelId Alphabet::find(std::string_view text) const
{
    auto it = ids_.find(std::string(text));
    return it == ids_.end() ? static_cast<LabelId>(texts_.size()) : it->second;
}

Signature::Signature(std::vector<LabelId> labels) : labels_(std::move(labels))
{
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    std::vector<std::uint64_t> wide(labels_.begin(), labels_.end());
    hash_ = tuple_index_hashed(wide);
}

Lts::Lts(std::size_t num_states, Alphabet alphabet, std::vector<Transition> transitions,
         StateId initial)
    : num_states_(num_states), initial_(initial), alphabet_(std::move(alphabet)),
      transitions_(std::move(transitions))
{
    if (num_states_ > 0 && initial_ >= num_states_)
        throw Error("initial state " + std::to_string(initial_) + " out of range");
    for (const auto& t : transitions_) {
        if (t.src >= num_states_ || t.dst >= num_states_)
            throw Error("state index out of range");
        if (t.label >= alphabet_.size())
            throw Error("label id out of range");
    }
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());

    out_offsets_.assign(num_states_ + 1, 0);
    in_offsets_.assign(num_states_ + 1, 0);
    for (const auto& t : transitions_) {
        ++out_offsets_[t.src + 1];
        ++in_offsets_[t.dst + 1];
    }
    for (std::size_t s = 0; s < num_states_; ++s) {
        out_offsets_[s + 1] += out_offsets_[s];
        in_offsets_[s + 1] += in_offsets_[s];
    }
    out_edges_.resize(transitions_.size());
    in_edges_.resize(transitions_.size());
    auto out_fill = out_offsets_;
    auto in_fill = in_offsets_;
    // Triples are sorted by (src, label, dst), so each out row comes out
    // sorted; in rows need a sort of their own.
    for (const auto& t : transitions_) {
        out_edges_[out_fill[t.src]++] = {t.label, t.dst};
        in_edges_[in_fill[t.dst]++] = {t.label, t.src};
    }
    for (std::size_t s = 0; s < num_states_; ++s)
        std::sort(in_edges_.begin() + in_offsets_[s], in_edges_.begin() + in_offsets_[s + 1]);
}

namespace {

class LineParser {
public:
    LineParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    void expect(char c)
    {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool try_consume(std::string_view word)
    {
        skip_ws();
        if (text_.substr(pos_, word.size()) == word) {
            pos_ += word.size();
            return true;
        }
        return false;
    }

    std::uint64_t number()
    {
        skip_ws();
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc() || ptr == text_.data() + pos_)
            fail("expected a non-negative integer");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    // A quoted label runs to the closing quote; an unquoted one runs to the
    // last comma on the line, so it may itself contain commas.
    std::string label()
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '"') {
            auto close = text_.find('"', pos_ + 1);
            if (close == std::string_view::npos)
                fail("unterminated quoted label");
            std::string result(text_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
            return result;
        }
        auto last_comma = text_.rfind(',');
        if (last_comma == std::string_view::npos || last_comma < pos_)
            fail("expected label");
        auto raw = text_.substr(pos_, last_comma - pos_);
        while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t'))
            raw.remove_suffix(1);
        if (raw.empty())
            fail("empty label");
        pos_ = last_comma;
        return std::string(raw);
    }

    void expect_end()
    {
        skip_ws();
        if (pos_ != text_.size())
            fail("trailing characters");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

bool blank(std::string_view s)
{
    return s.find_first_not_of(" \t") == std::string_view::npos;
}

} // namespace

Lts parse_aut(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (!blank(line))
                return true;
        }
        return false;
    };

    if (!next_line())
        throw ParseError(line_no == 0 ? 1 : line_no, "missing header");

    std::uint64_t initial = 0, n_trans = 0, n_states = 0;
    {
        LineParser p(line, line_no);
        if (!p.try_consume("des"))
            p.fail("malformed header: expected 'des'");
        p.expect('(');
        initial = p.number();
        p.expect(',');
        n_trans = p.number();
        p.expect(',');
        n_states = p.number();
        p.expect(')');
        p.expect_end();
        if (n_states == 0)
            p.fail("malformed header: state count must be positive");
        if (initial >= n_states)
            p.fail("malformed header: initial state out of range");
    }

    Alphabet alphabet;
    std::vector<Transition> transitions;
    transitions.reserve(n_trans);
    std::size_t seen = 0;
    while (next_line()) {
        LineParser p(line, line_no);
        p.expect('(');
        const auto src = p.number();
        p.expect(',');
        auto text = p.label();
        p.expect(',');
        const auto dst = p.number();
        p.expect(')');
        p.expect_end();
        if (src >= n_states || dst >= n_states)
            p.fail("state index out of range");
        ++seen;
        transitions.push_back({static_cast<StateId>(src), alphabet.intern(text), static_cast<StateId>(dst)});
    }
    if (seen != n_trans)
        throw ParseError(line_no, "transition count mismatch: header declares " + std::to_string(n_trans) +
                                      ", found " + std::to_string(seen));
    return Lts(n_states, std::move(alphabet), std::move(transitions), static_cast<StateId>(initial));
}

Lts parse_aut_string(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_aut(in);
}

Lts read_aut_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return parse_aut(in);
}

void write_aut(std::ostream& out, const Lts& lts)
{
    // Order by label text, not label id: ids depend on the order in which
    // labels were first seen, so id order would not survive a reparse.
    const auto& alphabet = lts.alphabet();
    std::vector<LabelId> by_text(alphabet.size());
    std::iota(by_text.begin(), by_text.end(), LabelId{0});
    std::sort(by_text.begin(), by_text.end(),
              [&](LabelId a, LabelId b) { return alphabet.text(a) < alphabet.text(b); });
    for (LabelId l = 0; l < alphabet.size(); ++l) {
        if (alphabet.text(l).find_first_of("\"\r\n") != std::string::npos)
            throw Error("label '" + alphabet.text(l) + "' cannot be written: it contains a quote or line break");
    }
    std::vector<LabelId> rank(alphabet.size());
    for (LabelId r = 0; r < by_text.size(); ++r)
        rank[by_text[r]] = r;

    std::vector<Transition> order(lts.transitions().begin(), lts.transitions().end());
    std::sort(order.begin(), order.end(), [&](const Transition& a, const Transition& b) {
        return std::tie(a.src, rank[a.label], a.dst) < std::tie(b.src, rank[b.label], b.dst);
    });

    out << "des (" << lts.initial() << "," << lts.num_transitions() << "," << lts.num_states() << ")\n";
    for (const auto& t : order)
        out << '(' << t.src << ",\"" << alphabet.text(t.label) << "\"," << t.dst << ")\n";
}

std::string write_aut_string(const Lts& lts)
{
    std::ostringstream out;
    write_aut(out, lts);
    return out.str();
}

Lts gen_chain(std::size_t n)
{
    if (n == 0)
        throw Error("gen_chain: n must be positive");
    Alphabet alphabet;
    const auto a = alphabet.intern("a");
    std::vector<Transition> transitions;
    transitions.reserve(2 * (n - 1));
    for (std::size_t chain = 0; chain < 2; ++chain) {
        const auto base = chain * n;
        for (std::size_t i = 0; i + 1 < n; ++i)
            transitions.push_back({static_cast<StateId>(base + i), a, static_cast<StateId>(base + i + 1)});
    }
    return Lts(2 * n, std::move(alphabet), std::move(transitions));
}

namespace {

// Portable bounded draw; std::uniform_int_distribution differs between
// standard libraries.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound)
{
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

} // namespace

Lts gen_random(std::size_t n_states, std::size_t n_labels, std::size_t n_transitions,
               std::uint64_t seed)
{
    if (n_states == 0)
        throw Error("gen_random: at least one state required");
    if (n_labels == 0 && n_transitions > 0)
        throw Error("gen_random: transitions require at least one label");
    if (n_states > std::numeric_limits<StateId>::max())
        throw Error("gen_random: too many states");
    // Saturates instead of overflowing; fits since n_states < 2^32.
    const std::uint64_t square = std::uint64_t{n_states} * n_states;
    const std::uint64_t labels = std::max<std::size_t>(n_labels, 1);
    const std::uint64_t space = labels > std::numeric_limits<std::uint64_t>::max() / square
                                    ? std::numeric_limits<std::uint64_t>::max()
                                    : square * labels;
    if (n_labels > 0 && n_transitions > space)
        throw Error("gen_random: " + std::to_string(n_transitions) +
                    " transitions infeasible for the given states and labels");

    Alphabet alphabet;
    for (std::size_t i = 0; i < n_labels; ++i)
        alphabet.intern("a" + std::to_string(i));

    std::mt19937_64 rng(seed);
    auto decode = [&](std::uint64_t code) {
        const auto dst = code % n_states;
        code /= n_states;
        const auto label = code % n_labels;
        const auto src = code / n_labels;
        return Transition{static_cast<StateId>(src), static_cast<LabelId>(label), static_cast<StateId>(dst)};
    };

    std::vector<Transition> transitions;
    transitions.reserve(n_transitions);
    if (n_transitions > 0 && n_transitions > space / 2) {
        // Dense request: partial Fisher-Yates over the whole triple space.
        std::vector<std::uint64_t> codes(static_cast<std::size_t>(space));
        for (std::size_t i = 0; i < codes.size(); ++i)
            codes[i] = i;
        for (std::size_t i = 0; i < n_transitions; ++i) {
            const auto j = i + draw_below(rng, codes.size() - i);
            std::swap(codes[i], codes[j]);
            transitions.push_back(decode(codes[i]));
        }
    } else if (n_transitions > 0) {
        std::unordered_set<std::uint64_t> used;
        used.reserve(n_transitions * 2);
        while (transitions.size() < n_transitions) {
            const auto code = draw_below(rng, static_cast<std::uint64_t>(space));
            if (used.insert(code).second)
                transitions.push_back(decode(code));
        }
    }
    return Lts(n_states, std::move(alphabet), std::move(transitions));
}

Signature signature_of(const Lts& lts, StateId s)
{
    if (s >= lts.num_states())
        throw Error("signature_of: state out of range");
    std::vector<LabelId> labels;
    labels.reserve(lts.out(s).size());
    for (const auto& e : lts.out(s))
        labels.push_back(e.label);
    return Signature(std::move(labels));
}

} // namespace bisim
