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

#include "bisim/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace bisim {

Partition oracle_partition(const Lts& lts)
{
    const auto n = lts.num_states();
    std::vector<BlockId> block(n, 0);
    std::size_t count = n == 0 ? 0 : 1;

    using Key = std::pair<BlockId, std::set<std::pair<LabelId, BlockId>>>;
    for (;;) {
        std::map<Key, BlockId> ids;
        std::vector<BlockId> next(n);
        const auto transitions = lts.transitions();
        std::size_t cursor = 0;
        for (StateId s = 0; s < n; ++s) {
            Key key{block[s], {}};
            // Transitions are sorted by source.
            for (; cursor < transitions.size() && transitions[cursor].src == s; ++cursor)
                key.second.emplace(transitions[cursor].label, block[transitions[cursor].dst]);
            auto [it, inserted] = ids.emplace(std::move(key), static_cast<BlockId>(ids.size()));
            next[s] = it->second;
        }
        block = std::move(next);
        if (ids.size() == count)
            break;
        count = ids.size();
    }
    return Partition::from_assignment(block);
}

std::optional<TransferViolation> find_transfer_violation(const Lts& lts, const Partition& partition)
{
    const auto n = lts.num_states();
    // moves[u] = {(a, block of u') | u -a-> u'}
    std::vector<std::set<std::pair<LabelId, BlockId>>> moves(n);
    std::vector<std::map<std::pair<LabelId, BlockId>, StateId>> witness(n);
    for (const auto& t : lts.transitions()) {
        const std::pair<LabelId, BlockId> key{t.label, partition.block_of(t.dst)};
        moves[t.src].insert(key);
        witness[t.src].emplace(key, t.dst);
    }
    // Relatedness is block equality, so it suffices to compare every state
    // with its block's first member in both directions.
    for (auto id : partition.block_ids()) {
        const auto& members = partition.block(id).members;
        const auto rep = members.front();
        for (auto v : members) {
            for (const auto& key : moves[rep]) {
                if (!moves[v].count(key))
                    return TransferViolation{rep, v, key.first, witness[rep].at(key)};
            }
            for (const auto& key : moves[v]) {
                if (!moves[rep].count(key))
                    return TransferViolation{v, rep, key.first, witness[v].at(key)};
            }
        }
    }
    return std::nullopt;
}

QuotientLts quotient(const Lts& lts, const Partition& partition)
{
    if (auto violation = find_transfer_violation(lts, partition))
        throw Error("quotient: partition is not stable (state " + std::to_string(violation->mover) +
                    " vs " + std::to_string(violation->partner) + ")");

    const auto form = canonical_form(partition);
    QuotientLts q;
    q.block_of.assign(lts.num_states(), 0);
    for (StateId b = 0; b < form.size(); ++b) {
        for (auto s : form[b])
            q.block_of[s] = b;
    }
    std::vector<Transition> transitions;
    transitions.reserve(lts.num_transitions());
    for (const auto& t : lts.transitions())
        transitions.push_back({q.block_of[t.src], t.label, q.block_of[t.dst]});
    const StateId initial = lts.num_states() == 0 ? 0 : q.block_of[lts.initial()];
    q.lts = Lts(form.size(), lts.alphabet(), std::move(transitions), initial);
    return q;
}

Lts disjoint_union(const Lts& left, const Lts& right)
{
    Alphabet alphabet;
    std::vector<Transition> transitions;
    transitions.reserve(left.num_transitions() + right.num_transitions());
    const auto shift = static_cast<StateId>(left.num_states());
    for (const auto& t : left.transitions())
        transitions.push_back({t.src, alphabet.intern(left.alphabet().text(t.label)), t.dst});
    for (const auto& t : right.transitions())
        transitions.push_back(
            {t.src + shift, alphabet.intern(right.alphabet().text(t.label)), t.dst + shift});
    return Lts(left.num_states() + right.num_states(), std::move(alphabet), std::move(transitions),
               left.initial());
}

bool quotient_is_sound(const Lts& lts, const QuotientLts& q)
{
    const auto joined = disjoint_union(lts, q.lts);
    const auto classes = oracle_partition(joined);
    const auto shift = static_cast<StateId>(lts.num_states());
    for (StateId s = 0; s < lts.num_states(); ++s) {
        if (classes.block_of(s) != classes.block_of(q.block_of[s] + shift))
            return false;
    }
    return true;
}

} // namespace bisim
