#include "succession/ledger.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace succession::ledger {

namespace {

using nlohmann::json;

constexpr char kRecordSeparator = '\x1f';

void require(bool condition, const std::string& message) {
    if (!condition) throw std::domain_error(message);
}

std::string zero_hash() {
    return std::string(64, '0');
}

bool is_hex64(std::string_view text) {
    if (text.size() != 64) return false;
    return std::all_of(text.begin(), text.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

// Length-prefixed string: "<len>:<bytes>". Keeps the encoding injective
// whatever bytes the identifier contains.
void append_netstring(std::string& out, std::string_view text) {
    out += std::to_string(text.size());
    out.push_back(':');
    out += text;
}

json record_to_json(const TransactionRecord& record) {
    json j;
    j["seller"] = record.seller_id;
    j["buyer"] = record.buyer_id;
    if (record.segment.kind == SegmentKind::PriceRange) {
        j["kind"] = "price_range";
        j["segment"] = record.segment.range_index;
    } else {
        j["kind"] = "service_category";
        j["segment"] = record.segment.category;
    }
    j["value"] = record.value;
    j["tick"] = record.tick;
    j["fulfilled"] = record.fulfilled;
    return j;
}

TransactionRecord record_from_json(const json& j) {
    TransactionRecord record;
    record.seller_id = j.at("seller").get<std::string>();
    record.buyer_id = j.at("buyer").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "price_range") {
        record.segment = SegmentKey::price_range(j.at("segment").get<std::int64_t>());
    } else if (kind == "service_category") {
        record.segment = SegmentKey::service_category(j.at("segment").get<std::string>());
    } else {
        throw std::domain_error("record: unknown segment kind '" + kind + "'");
    }
    record.value = j.at("value").get<std::int64_t>();
    record.tick = j.at("tick").get<std::int64_t>();
    record.fulfilled = j.at("fulfilled").get<bool>();
    return record;
}

std::string canonical_header(const Segmentation& segmentation) {
    std::string out;
    out += kChainFormat;
    out.push_back(',');
    out += std::to_string(kChainVersion);
    out.push_back(',');
    out += kHashAlgorithm;
    for (std::int64_t boundary : segmentation.boundaries()) {
        out.push_back(',');
        out += std::to_string(boundary);
    }
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace

SegmentKey SegmentKey::price_range(std::int64_t index) {
    require(index >= 1, "segment: price-range index must be >= 1");
    SegmentKey key;
    key.kind = SegmentKind::PriceRange;
    key.range_index = index;
    return key;
}

SegmentKey SegmentKey::service_category(std::string name) {
    require(!name.empty(), "segment: empty service-category name");
    SegmentKey key;
    key.kind = SegmentKind::ServiceCategory;
    key.category = std::move(name);
    return key;
}

std::string format_segment(const SegmentKey& key) {
    if (key.kind == SegmentKind::PriceRange) {
        return "price:" + std::to_string(key.range_index);
    }
    return "service:" + key.category;
}

SegmentKey parse_segment(const std::string& text) {
    if (text.rfind("price:", 0) == 0) {
        const std::string digits = text.substr(6);
        require(!digits.empty() &&
                    std::all_of(digits.begin(), digits.end(),
                                [](char c) { return c >= '0' && c <= '9'; }),
                "segment: bad price-range index '" + text + "'");
        return SegmentKey::price_range(std::stoll(digits));
    }
    if (text.rfind("service:", 0) == 0) {
        return SegmentKey::service_category(text.substr(8));
    }
    throw std::domain_error("segment: expected 'price:<index>' or 'service:<name>', got '" + text + "'");
}

Segmentation::Segmentation(std::vector<std::int64_t> boundaries)
    : boundaries_(std::move(boundaries)) {
    require(!boundaries_.empty(), "segmentation: no boundaries");
    std::int64_t prev = 0;
    for (std::int64_t boundary : boundaries_) {
        require(boundary > prev, "segmentation: boundaries must be strictly increasing and positive");
        prev = boundary;
    }
}

SegmentKey Segmentation::classify(std::int64_t value) const {
    require(value >= 0, "classify: negative value");
    const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), value);
    return SegmentKey::price_range(static_cast<std::int64_t>(it - boundaries_.begin()) + 1);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0f]);
    }
    return out;
}

std::string canonical_record(const TransactionRecord& record) {
    std::string out;
    append_netstring(out, record.seller_id);
    out.push_back(',');
    append_netstring(out, record.buyer_id);
    out.push_back(',');
    if (record.segment.kind == SegmentKind::PriceRange) {
        out.push_back('0');
        out.push_back(',');
        out += std::to_string(record.segment.range_index);
    } else {
        out.push_back('1');
        out.push_back(',');
        append_netstring(out, record.segment.category);
    }
    out.push_back(',');
    out += std::to_string(record.value);
    out.push_back(',');
    out += std::to_string(record.tick);
    out.push_back(',');
    out.push_back(record.fulfilled ? '1' : '0');
    return out;
}

std::string block_preimage(std::uint64_t index, std::string_view prev_hash,
                           std::span<const TransactionRecord> records) {
    std::string out = std::to_string(index);
    out.push_back(',');
    out += prev_hash;
    for (const TransactionRecord& record : records) {
        out.push_back(kRecordSeparator);
        out += canonical_record(record);
    }
    return out;
}

Chain::Chain(Segmentation segmentation) : segmentation_(std::move(segmentation)) {}

void Chain::validate_record(const TransactionRecord& record) const {
    require(!record.seller_id.empty(), "record: empty seller id");
    require(!record.buyer_id.empty(), "record: empty buyer id");
    require(record.value >= 0, "record: negative value");
    require(record.tick >= 0, "record: negative tick");
    if (record.segment.kind == SegmentKind::PriceRange) {
        require(record.segment.range_index >= 1 &&
                    record.segment.range_index <= segmentation_.segment_count(),
                "record: price-range index outside segmentation");
        require(record.segment == segmentation_.classify(record.value),
                "record: price segment does not match value");
    } else {
        require(!record.segment.category.empty(), "record: empty service category");
    }
}

void Chain::append(std::vector<TransactionRecord> records) {
    require(!records.empty(), "append: empty record batch");
    for (const TransactionRecord& record : records) validate_record(record);

    Block block;
    block.index = blocks_.size();
    block.prev_hash = blocks_.empty() ? zero_hash() : blocks_.back().hash;
    block.records = std::move(records);
    block.hash = sha256_hex(block_preimage(block.index, block.prev_hash, block.records));
    blocks_.push_back(std::move(block));
}

bool Chain::verify() const {
    std::string prev = zero_hash();
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const Block& block = blocks_[i];
        if (block.index != i) return false;
        if (block.prev_hash != prev) return false;
        if (block.records.empty()) return false;
        if (block.hash != sha256_hex(block_preimage(block.index, block.prev_hash, block.records))) {
            return false;
        }
        prev = block.hash;
    }
    return true;
}

ReputationScore Chain::reputation_of(std::string_view seller_id, const SegmentKey& segment,
                                     TickInterval window) const {
    require(window.start <= window.end, "reputation: inverted window");
    ReputationScore score{0, 0, window};
    for (const Block& block : blocks_) {
        for (const TransactionRecord& record : block.records) {
            if (record.seller_id != seller_id) continue;
            if (record.segment != segment) continue;
            if (record.tick < window.start || record.tick >= window.end) continue;
            score.n += 1;
            if (record.fulfilled) score.k += 1;
        }
    }
    return score;
}

TrustMeasure Chain::trust_of(std::string_view seller_id, const SegmentKey& segment,
                             TickInterval window) const {
    return trust(reputation_of(seller_id, segment, window));
}

std::vector<EpochScore> Chain::epoch_slices(std::string_view seller_id, const SegmentKey& segment,
                                            std::span<const std::int64_t> boundaries) const {
    require(boundaries.size() >= 2, "epoch slices: need at least two boundaries");
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
        require(boundaries[i] < boundaries[i + 1], "epoch slices: boundaries not strictly increasing");
    }
    std::vector<EpochScore> slices;
    slices.reserve(boundaries.size() - 1);
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
        const TickInterval interval{boundaries[i], boundaries[i + 1]};
        const ReputationScore score = reputation_of(seller_id, segment, interval);
        slices.push_back(EpochScore{score.n, score.k, interval});
    }
    return slices;
}

std::string chain_to_string(const Chain& chain) {
    json header;
    header["format"] = kChainFormat;
    header["version"] = kChainVersion;
    header["algorithm"] = kHashAlgorithm;
    header["boundaries"] = chain.segmentation().boundaries();
    header["header_hash"] = sha256_hex(canonical_header(chain.segmentation()));

    std::string out = header.dump();
    out.push_back('\n');
    for (const Block& block : chain.blocks()) {
        json j;
        j["index"] = block.index;
        j["prev_hash"] = block.prev_hash;
        j["hash"] = block.hash;
        json records = json::array();
        for (const TransactionRecord& record : block.records) {
            records.push_back(record_to_json(record));
        }
        j["records"] = std::move(records);
        out += j.dump();
        out.push_back('\n');
    }
    return out;
}

Chain chain_from_string(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    require(!lines.empty(), "chain: empty file");

    json header;
    try {
        header = json::parse(lines.front());
    } catch (const json::exception& e) {
        throw std::domain_error(std::string("chain: malformed header: ") + e.what());
    }

    try {
        require(header.at("format").get<std::string>() == kChainFormat, "chain: unknown format");
        require(header.at("version").get<int>() == kChainVersion, "chain: unsupported version");
        require(header.at("algorithm").get<std::string>() == kHashAlgorithm,
                "chain: unsupported digest algorithm");
        Segmentation segmentation(header.at("boundaries").get<std::vector<std::int64_t>>());
        require(header.at("header_hash").get<std::string>() ==
                    sha256_hex(canonical_header(segmentation)),
                "chain: header digest mismatch");

        Chain chain(std::move(segmentation));
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const json j = json::parse(lines[i]);
            Block block;
            block.index = j.at("index").get<std::uint64_t>();
            block.prev_hash = j.at("prev_hash").get<std::string>();
            block.hash = j.at("hash").get<std::string>();
            require(is_hex64(block.prev_hash) && is_hex64(block.hash), "chain: malformed digest");
            for (const json& rj : j.at("records")) {
                block.records.push_back(record_from_json(rj));
            }
            require(!block.records.empty(), "chain: block without records");
            for (const TransactionRecord& record : block.records) {
                chain.validate_record(record);
            }
            chain.blocks_.push_back(std::move(block));
        }
        return chain;
    } catch (const json::exception& e) {
        throw std::domain_error(std::string("chain: malformed block: ") + e.what());
    }
}

void save_chain(const Chain& chain, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << chain_to_string(chain);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Chain load_chain(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open chain file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return chain_from_string(buffer.str());
}

std::vector<TransactionRecord> parse_records(const std::string& text) {
    std::vector<TransactionRecord> records;
    for (const std::string& line : split_lines(text)) {
        try {
            records.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw std::domain_error(std::string("record: malformed JSON line: ") + e.what());
        }
    }
    return records;
}

std::vector<TransactionRecord> load_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open records file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_records(buffer.str());
}

} // namespace succession::ledger
