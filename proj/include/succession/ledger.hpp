#pragma once

#include "succession/trust_engine.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Marketplace bookkeeping: one shared append-only hash chain per market,
// with per-seller, per-segment reputation obtained by folding over it.
// Feedback is the binary fulfilled/not-fulfilled verdict a transaction's
// contract emits; there are no star ratings.
namespace succession::ledger {

inline constexpr std::string_view kHashAlgorithm = "sha256";
inline constexpr std::string_view kChainFormat = "succession-chain";
inline constexpr int kChainVersion = 1;

enum class SegmentKind { PriceRange, ServiceCategory };

// Identifies one market segment: a 1-based price-range index or a named
// service category. Reputation never crosses segment boundaries.
struct SegmentKey {
    SegmentKind kind = SegmentKind::PriceRange;
    std::int64_t range_index = 0; // PriceRange only
    std::string category;         // ServiceCategory only

    static SegmentKey price_range(std::int64_t index);
    static SegmentKey service_category(std::string name);

    friend bool operator==(const SegmentKey&, const SegmentKey&) = default;
};

// "price:3" or "service:gas_boiler".
std::string format_segment(const SegmentKey& key);
SegmentKey parse_segment(const std::string& text);

// Price ranges: [0, b1), [b1, b2), ..., [b_last, inf), numbered from 1.
// Boundaries are strictly increasing positive currency units.
class Segmentation {
public:
    explicit Segmentation(std::vector<std::int64_t> boundaries);

    std::int64_t segment_count() const noexcept {
        return static_cast<std::int64_t>(boundaries_.size()) + 1;
    }
    const std::vector<std::int64_t>& boundaries() const noexcept { return boundaries_; }

    // The unique range containing `value`; boundary values belong to the
    // upper range. value must be non-negative.
    SegmentKey classify(std::int64_t value) const;

private:
    std::vector<std::int64_t> boundaries_;
};

// One contract-adjudicated transaction event.
struct TransactionRecord {
    std::string seller_id;
    std::string buyer_id;
    SegmentKey segment;
    std::int64_t value = 0; // integer currency units
    std::int64_t tick = 0;
    bool fulfilled = false;

    friend bool operator==(const TransactionRecord&, const TransactionRecord&) = default;
};

struct Block {
    std::uint64_t index = 0;
    std::string prev_hash; // 64 lowercase hex chars; block 0 uses all zeros
    std::vector<TransactionRecord> records;
    std::string hash;
};

std::string sha256_hex(std::string_view data);

// Injective byte encodings fed to the digest: fixed field order, integers
// as decimal ASCII, strings length-prefixed, records joined with 0x1f.
std::string canonical_record(const TransactionRecord& record);
std::string block_preimage(std::uint64_t index, std::string_view prev_hash,
                           std::span<const TransactionRecord> records);

class Chain {
public:
    explicit Chain(Segmentation segmentation);

    // Validates the whole batch, then appends it as one block. Throws
    // std::domain_error on any invalid record, leaving the chain unchanged.
    void append(std::vector<TransactionRecord> records);

    // True iff every hash recomputes, every block links to its predecessor,
    // and indices run 0..len-1. Never throws; an empty chain is valid.
    bool verify() const;

    // Counts only this seller's records in this segment within the window.
    ReputationScore reputation_of(std::string_view seller_id, const SegmentKey& segment,
                                  TickInterval window) const;

    TrustMeasure trust_of(std::string_view seller_id, const SegmentKey& segment,
                          TickInterval window) const;

    // Splits [boundaries.front(), boundaries.back()) into contiguous epochs
    // whose aggregate equals reputation_of over the same span.
    std::vector<EpochScore> epoch_slices(std::string_view seller_id, const SegmentKey& segment,
                                         std::span<const std::int64_t> boundaries) const;

    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    const Segmentation& segmentation() const noexcept { return segmentation_; }

private:
    friend Chain chain_from_string(const std::string& text);

    void validate_record(const TransactionRecord& record) const;

    Segmentation segmentation_;
    std::vector<Block> blocks_;
};

// Chain file format: JSON lines (one header object, then one object per
// block), UTF-8, hashes as lowercase hex. The header carries the digest
// algorithm and the price segmentation, protected by its own digest.
std::string chain_to_string(const Chain& chain);
Chain chain_from_string(const std::string& text); // throws std::domain_error on malformed input
void save_chain(const Chain& chain, const std::string& path);
Chain load_chain(const std::string& path);

// Ingestion file: JSON lines of TransactionRecord.
std::vector<TransactionRecord> parse_records(const std::string& text);
std::vector<TransactionRecord> load_records(const std::string& path);

} // namespace succession::ledger
