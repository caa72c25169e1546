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

#ifndef BISIM_LTS_HPP
#define BISIM_LTS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bisim {

using StateId = std::uint32_t;
using LabelId = std::uint32_t;

/// Base class of every error reported by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed Aldebaran input. `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Transition {
    StateId src;
    LabelId label;
    StateId dst;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// One adjacency entry: the label and the state at the other end of the edge.
struct Edge {
    LabelId label;
    StateId state;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Dense label interning table.
class Alphabet {
public:
    LabelId intern(std::string_view text);
    /// Returns the id of `text`, or size() if the label is unknown.
    LabelId find(std::string_view text) const;
    const std::string& text(LabelId id) const { return texts_.at(id); }
    std::size_t size() const noexcept { return texts_.size(); }

private:
    std::vector<std::string> texts_;
    std::unordered_map<std::string, LabelId> ids_;
};

/// Set of outgoing labels of a state, strictly sorted, with a digest fixed
/// at construction.
class Signature {
public:
    Signature() = default;
    /// Accepts labels in any order, duplicates allowed.
    explicit Signature(std::vector<LabelId> labels);

    std::span<const LabelId> labels() const noexcept { return labels_; }
    std::uint64_t hash() const noexcept { return hash_; }
    bool empty() const noexcept { return labels_.empty(); }

    friend bool operator==(const Signature& a, const Signature& b) noexcept
    {
        return a.hash_ == b.hash_ && a.labels_ == b.labels_;
    }

private:
    std::vector<LabelId> labels_;
    std::uint64_t hash_ = 0;
};

struct SignatureHash {
    std::size_t operator()(const Signature& s) const noexcept { return s.hash(); }
};

/// Immutable labelled transition system with forward and reverse adjacency
/// stored in compressed rows. Exact duplicate triples are collapsed.
class Lts {
public:
    Lts() = default;
    /// Builds from an arbitrary list of triples; throws Error when a state
    /// or label id is out of range.
    Lts(std::size_t num_states, Alphabet alphabet, std::vector<Transition> transitions,
        StateId initial = 0);

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_transitions() const noexcept { return transitions_.size(); }
    std::size_t num_labels() const noexcept { return alphabet_.size(); }
    StateId initial() const noexcept { return initial_; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }

    /// Sorted by (src, label, dst).
    std::span<const Transition> transitions() const noexcept { return transitions_; }

    /// Outgoing edges of `s`, sorted by (label, target).
    std::span<const Edge> out(StateId s) const noexcept
    {
        return {out_edges_.data() + out_offsets_[s], out_edges_.data() + out_offsets_[s + 1]};
    }
    /// Incoming edges of `s` as (label, source), sorted.
    std::span<const Edge> in(StateId s) const noexcept
    {
        return {in_edges_.data() + in_offsets_[s], in_edges_.data() + in_offsets_[s + 1]};
    }

private:
    std::size_t num_states_ = 0;
    StateId initial_ = 0;
    Alphabet alphabet_;
    std::vector<Transition> transitions_;
    std::vector<std::size_t> out_offsets_{0};
    std::vector<Edge> out_edges_;
    std::vector<std::size_t> in_offsets_{0};
    std::vector<Edge> in_edges_;
};

/// Reads the Aldebaran `.aut` format.
Lts parse_aut(std::istream& in);
Lts parse_aut_string(std::string_view text);
Lts read_aut_file(const std::string& path);

/// Writes `.aut` text with LF line endings and every label quoted.
void write_aut(std::ostream& out, const Lts& lts);
std::string write_aut_string(const Lts& lts);

/// Two disjoint a-chains of n states each: i -> i+1 for 0 <= i < n-1 and
/// n <= i < 2n-1 (0-based). Throws Error for n = 0.
Lts gen_chain(std::size_t n);

/// Uniformly samples `n_transitions` distinct triples. Labels are named
/// "a0", "a1", ... Deterministic for a fixed seed.
Lts gen_random(std::size_t n_states, std::size_t n_labels, std::size_t n_transitions,
               std::uint64_t seed);

Signature signature_of(const Lts& lts, StateId s);

} // namespace bisim

#endif // BISIM_LTS_HPP
