#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace keygraph {

/// Unordered node pairs (i, j), i < j, enumerated lexicographically:
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline std::size_t pair_count(std::uint32_t n) {
    return std::size_t{n} * (n - 1) / 2;
}

inline std::size_t pair_row_offset(std::uint32_t n, std::uint32_t i) {
    // sum_{r<i} (n-1-r)
    return std::size_t{i} * (n - 1) - std::size_t{i} * (i - 1) / 2;
}

inline std::size_t pair_index(std::uint32_t n, std::uint32_t i, std::uint32_t j) {
    return pair_row_offset(n, i) + (j - i - 1);
}

enum class Storage { automatic, dense, sparse };

/// Largest n stored as a dense pair bitset; larger relations fall back to a
/// sorted pair list.
inline constexpr std::uint32_t kDenseNodeLimit = 4096;

/// Symmetric irreflexive relation over n nodes. Dense mode packs one bit per
/// unordered pair; sparse mode keeps a sorted list of packed (i<<32)|j pairs.
class PairRelation {
  public:
    PairRelation() = default;

    static PairRelation make(std::uint32_t n, Storage storage = Storage::automatic);

    std::uint32_t node_count() const { return n_; }
    bool is_dense() const { return dense_; }

    std::size_t word_count() const { return (pair_count(n_) + 63) / 64; }
    std::uint64_t* words() { return words_.data(); }
    const std::uint64_t* words() const { return words_.data(); }
    std::vector<std::uint64_t>& word_storage() { return words_; }

    std::vector<std::uint64_t>& pair_storage() { return pairs_; }
    const std::vector<std::uint64_t>& packed_pairs() const { return pairs_; }

    static std::uint64_t pack(std::uint32_t i, std::uint32_t j) {
        return (std::uint64_t{i} << 32) | j;
    }

    void set(std::uint32_t i, std::uint32_t j);
    bool contains(std::uint32_t i, std::uint32_t j) const;
    std::uint64_t edge_count() const;

    /// Visits edges in ascending (i, j) order.
    template <typename Fn>
    void for_each_edge(Fn&& fn) const {
        if (dense_) {
            const std::size_t npairs = pair_count(n_);
            std::uint32_t i = 0;
            std::size_t row_begin = 0;
            std::size_t row_end = n_ > 1 ? n_ - 1 : 0;
            for (std::size_t w = 0; w < words_.size(); ++w) {
                std::uint64_t bits = words_[w];
                while (bits != 0) {
                    const int b = __builtin_ctzll(bits);
                    bits &= bits - 1;
                    const std::size_t pidx = w * 64 + static_cast<std::size_t>(b);
                    if (pidx >= npairs) break;
                    while (pidx >= row_end) {
                        ++i;
                        row_begin = row_end;
                        row_end += n_ - 1 - i;
                    }
                    const auto j = static_cast<std::uint32_t>(i + 1 + (pidx - row_begin));
                    fn(i, j);
                }
            }
        } else {
            for (std::uint64_t pk : pairs_) {
                fn(static_cast<std::uint32_t>(pk >> 32),
                   static_cast<std::uint32_t>(pk & 0xFFFFFFFFull));
            }
        }
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

    PairRelation to_dense() const;
    PairRelation to_sparse() const;

    bool operator==(const PairRelation& other) const;

  private:
    std::uint32_t n_ = 0;
    bool dense_ = true;
    std::vector<std::uint64_t> words_;  // dense mode
    std::vector<std::uint64_t> pairs_;  // sparse mode, sorted
};

/// Pairwise conjunction of two relations over the same node set.
/// Throws std::invalid_argument on mismatched node counts.
PairRelation intersect_relations(const PairRelation& a, const PairRelation& b);

/// Line-oriented edge-list dump: header "n=<n> layer=<name>", then one
/// "i j" line per edge, 0-indexed, i < j, ascending.
void dump_edge_list(std::ostream& os, const PairRelation& rel, std::string_view layer);

}  // namespace keygraph
