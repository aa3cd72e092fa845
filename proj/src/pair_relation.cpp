#include "keygraph/pair_relation.hpp"

#include <algorithm>
#include <cassert>

#include "keygraph/kernels.hpp"

namespace keygraph {

PairRelation PairRelation::make(std::uint32_t n, Storage storage) {
    if (n < 2) throw std::invalid_argument("relation needs at least 2 nodes");
    PairRelation rel;
    rel.n_ = n;
    rel.dense_ = storage == Storage::automatic ? n <= kDenseNodeLimit
                                               : storage == Storage::dense;
    if (rel.dense_) rel.words_.assign((pair_count(n) + 63) / 64, 0);
    return rel;
}

void PairRelation::set(std::uint32_t i, std::uint32_t j) {
    assert(i < j && j < n_);
    if (dense_) {
        const std::size_t pidx = pair_index(n_, i, j);
        words_[pidx / 64] |= std::uint64_t{1} << (pidx % 64);
    } else {
        // Sparse mode keeps pairs sorted; producers emit in ascending order.
        assert(pairs_.empty() || pairs_.back() < pack(i, j));
        pairs_.push_back(pack(i, j));
    }
}

bool PairRelation::contains(std::uint32_t i, std::uint32_t j) const {
    if (i == j || i >= n_ || j >= n_) return false;
    if (i > j) std::swap(i, j);
    if (dense_) {
        const std::size_t pidx = pair_index(n_, i, j);
        return (words_[pidx / 64] >> (pidx % 64)) & 1;
    }
    return std::binary_search(pairs_.begin(), pairs_.end(), pack(i, j));
}

std::uint64_t PairRelation::edge_count() const {
    if (dense_) return kernels::active_ops().popcount_words(words_.data(), words_.size());
    return pairs_.size();
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> PairRelation::edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(edge_count());
    for_each_edge([&](std::uint32_t i, std::uint32_t j) { out.emplace_back(i, j); });
    return out;
}

PairRelation PairRelation::to_dense() const {
    if (dense_) return *this;
    PairRelation rel = make(n_, Storage::dense);
    for_each_edge([&](std::uint32_t i, std::uint32_t j) { rel.set(i, j); });
    return rel;
}

PairRelation PairRelation::to_sparse() const {
    if (!dense_) return *this;
    PairRelation rel = make(n_, Storage::sparse);
    rel.pairs_.reserve(edge_count());
    for_each_edge([&](std::uint32_t i, std::uint32_t j) { rel.pairs_.push_back(pack(i, j)); });
    return rel;
}

bool PairRelation::operator==(const PairRelation& other) const {
    if (n_ != other.n_) return false;
    if (dense_ && other.dense_) return words_ == other.words_;
    if (!dense_ && !other.dense_) return pairs_ == other.pairs_;
    return to_sparse().packed_pairs() == other.to_sparse().packed_pairs();
}

PairRelation intersect_relations(const PairRelation& a, const PairRelation& b) {
    if (a.node_count() != b.node_count()) {
        throw std::invalid_argument("cannot intersect relations over different node counts");
    }
    if (a.is_dense() != b.is_dense()) {
        // Normalize to the first operand's storage.
        return intersect_relations(a, a.is_dense() ? b.to_dense() : b.to_sparse());
    }
    if (a.is_dense()) {
        PairRelation out = PairRelation::make(a.node_count(), Storage::dense);
        kernels::active_ops().and_words(a.words(), b.words(), out.word_count(), out.words());
        return out;
    }
    PairRelation out = PairRelation::make(a.node_count(), Storage::sparse);
    std::set_intersection(a.packed_pairs().begin(), a.packed_pairs().end(),
                          b.packed_pairs().begin(), b.packed_pairs().end(),
                          std::back_inserter(out.pair_storage()));
    return out;
}

void dump_edge_list(std::ostream& os, const PairRelation& rel, std::string_view layer) {
    os << "n=" << rel.node_count() << " layer=" << layer << '\n';
    rel.for_each_edge([&](std::uint32_t i, std::uint32_t j) { os << i << ' ' << j << '\n'; });
}

}  // namespace keygraph
