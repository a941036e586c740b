#include <mpad/wire.hpp>

#include <mpad/error.hpp>

#include <boost/crc.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>

namespace mpad {

namespace {

class Writer {
public:
    explicit Writer(wire::RecordType type) {
        m_out.insert(m_out.end(), wire::magic.begin(), wire::magic.end());
        m_out.push_back(wire::version);
        m_out.push_back(static_cast<std::uint8_t>(type));
    }

    template <typename T>
    void put(T value) {
        for(std::size_t i = 0; i < sizeof(T); ++i) {
            m_out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
        }
    }

    void put_f64(double value) { put(std::bit_cast<std::uint64_t>(value)); }

    void put_bytes(std::span<const std::uint8_t> bytes) { m_out.insert(m_out.end(), bytes.begin(), bytes.end()); }

    std::vector<std::uint8_t>& bytes() { return m_out; }

private:
    std::vector<std::uint8_t> m_out;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, wire::RecordType type) : m_in(bytes) {
        if(m_in.size() < wire::preamble_size || !std::equal(wire::magic.begin(), wire::magic.end(), m_in.begin())) {
            throw FormatError("missing MPAD magic");
        }
        if(m_in[4] != wire::version) {
            throw FormatError("unsupported record version " + std::to_string(m_in[4]));
        }
        if(m_in[5] != static_cast<std::uint8_t>(type)) {
            throw FormatError("record type " + std::to_string(m_in[5]) + ", expected " +
                              std::to_string(static_cast<int>(type)));
        }
        m_pos = wire::preamble_size;
    }

    template <typename T>
    T get() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for(std::size_t i = 0; i < sizeof(T); ++i) {
            v |= std::uint64_t{m_in[m_pos + i]} << (8 * i);
        }
        m_pos += sizeof(T);
        return static_cast<T>(v);
    }

    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

    std::span<const std::uint8_t> get_bytes(std::size_t count) {
        need(count);
        auto out = m_in.subspan(m_pos, count);
        m_pos += count;
        return out;
    }

    void expect_end() const {
        if(m_pos != m_in.size()) {
            throw FormatError(std::to_string(m_in.size() - m_pos) + " trailing bytes after record");
        }
    }

private:
    void need(std::size_t count) const {
        if(m_in.size() - m_pos < count) {
            throw FormatError("record truncated");
        }
    }

    std::span<const std::uint8_t> m_in;
    std::size_t m_pos = 0;
};

std::size_t packed_size(std::uint64_t bits) {
    return static_cast<std::size_t>(bits / 8 + (bits % 8 != 0));
}

std::uint64_t checked_area(std::uint64_t k, std::uint64_t n) {
    const auto total = static_cast<unsigned __int128>(k) * n;
    if(total > (static_cast<unsigned __int128>(1) << 40)) {
        throw FormatError("matrix of " + std::to_string(k) + "x" + std::to_string(n) + " bits is too large to load");
    }
    return static_cast<std::uint64_t>(total);
}

std::vector<std::uint8_t> frame_without_crc(const Ciphertext& ct) {
    Writer w(wire::RecordType::frame);
    w.put<std::uint32_t>(ct.pair.low);
    w.put<std::uint32_t>(ct.pair.high);
    w.put<std::uint16_t>(ct.slot);
    w.put<std::uint64_t>(ct.eta);
    w.put<std::uint64_t>(ct.m());
    w.put_bytes(ct.payload.to_bytes());
    return std::move(w.bytes());
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

std::uint32_t frame_checksum(const Ciphertext& ct) {
    return crc32(frame_without_crc(ct));
}

std::vector<std::uint8_t> serialize(const RandomMatrix& matrix) {
    Writer w(wire::RecordType::matrix);
    w.put<std::uint64_t>(matrix.k());
    w.put<std::uint64_t>(matrix.n());
    w.put_f64(matrix.spec().bias);
    w.put_bytes(matrix.packed());
    return std::move(w.bytes());
}

std::vector<std::uint8_t> serialize(const PairwiseKey& key) {
    Writer w(wire::RecordType::key);
    w.put<std::uint32_t>(key.pair().low);
    w.put<std::uint32_t>(key.pair().high);
    w.put<std::uint16_t>(key.slot());
    w.put<std::uint64_t>(key.n());
    w.put<std::uint64_t>(key.k());
    for(const auto v : key.values()) {
        w.put<std::uint64_t>(v);
    }
    return std::move(w.bytes());
}

std::vector<std::uint8_t> serialize(const Ciphertext& ct) {
    auto out = frame_without_crc(ct);
    for(std::size_t i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(ct.checksum >> (8 * i)));
    }
    return out;
}

RandomMatrix parse_matrix(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, wire::RecordType::matrix);
    MatrixSpec spec;
    spec.k = r.get<std::uint64_t>();
    spec.n = r.get<std::uint64_t>();
    spec.bias = r.get_f64();
    try {
        spec.check();
    } catch(const InvalidParams& e) {
        throw FormatError(std::string("bad matrix header: ") + e.what());
    }
    const auto packed = r.get_bytes(packed_size(checked_area(spec.k, spec.n)));
    r.expect_end();
    return RandomMatrix::from_packed(spec, packed);
}

PairwiseKey parse_key(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, wire::RecordType::key);
    const auto low = r.get<std::uint32_t>();
    const auto high = r.get<std::uint32_t>();
    const auto slot = r.get<std::uint16_t>();
    const auto n = r.get<std::uint64_t>();
    const auto k = r.get<std::uint64_t>();
    if(k == 0 || k > (bytes.size() / 8)) {
        throw FormatError("key component count " + std::to_string(k) + " inconsistent with record size");
    }
    std::vector<std::uint64_t> values(k);
    for(auto& v : values) {
        v = r.get<std::uint64_t>();
    }
    r.expect_end();
    try {
        return PairwiseKey(DevicePair{low, high}, slot, n, std::move(values));
    } catch(const InvalidParams& e) {
        throw FormatError(std::string("bad key record: ") + e.what());
    }
}

std::size_t frame_length(std::span<const std::uint8_t> bytes) {
    if(bytes.size() < wire::frame_header_size) {
        throw FormatError("frame header truncated");
    }
    Reader r(bytes.first(wire::frame_header_size), wire::RecordType::frame);
    r.get<std::uint32_t>();
    r.get<std::uint32_t>();
    r.get<std::uint16_t>();
    r.get<std::uint64_t>();
    const auto m = r.get<std::uint64_t>();
    if(m > (std::uint64_t{1} << 40)) {
        throw FormatError("frame length field too large");
    }
    return wire::frame_header_size + packed_size(m) + 4;
}

Ciphertext parse_frame(std::span<const std::uint8_t> bytes) {
    const std::size_t expected = frame_length(bytes);
    if(bytes.size() != expected) {
        throw FormatError("frame is " + std::to_string(bytes.size()) + " bytes, header implies " +
                          std::to_string(expected));
    }
    Reader r(bytes, wire::RecordType::frame);
    Ciphertext ct;
    const auto low = r.get<std::uint32_t>();
    const auto high = r.get<std::uint32_t>();
    if(low >= high) {
        throw FormatError("frame pair must be ordered low < high");
    }
    ct.pair = DevicePair{low, high};
    ct.slot = r.get<std::uint16_t>();
    ct.eta = r.get<std::uint64_t>();
    const auto m = r.get<std::uint64_t>();
    ct.payload = BitVector::from_bytes(r.get_bytes(packed_size(m)), m);
    ct.checksum = r.get<std::uint32_t>();
    r.expect_end();
    return ct;
}

std::vector<Ciphertext> parse_frames(std::span<const std::uint8_t> bytes) {
    std::vector<Ciphertext> out;
    while(!bytes.empty()) {
        const std::size_t len = frame_length(bytes);
        if(len > bytes.size()) {
            throw FormatError("transcript ends inside a frame");
        }
        out.push_back(parse_frame(bytes.first(len)));
        bytes = bytes.subspan(len);
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for(const auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if(hex.starts_with("0x") || hex.starts_with("0X")) {
        hex.remove_prefix(2);
    }
    if(hex.size() % 2 != 0) {
        throw FormatError("hex string has odd length");
    }
    auto nibble = [](char c) -> std::uint8_t {
        if(c >= '0' && c <= '9') {
            return static_cast<std::uint8_t>(c - '0');
        }
        if(c >= 'a' && c <= 'f') {
            return static_cast<std::uint8_t>(c - 'a' + 10);
        }
        if(c >= 'A' && c <= 'F') {
            return static_cast<std::uint8_t>(c - 'A' + 10);
        }
        throw FormatError(std::string("invalid hex digit '") + c + "'");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for(std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if(!in) {
        throw Error("cannot open " + path.string());
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if(!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if(!out) {
        throw Error("short write to " + path.string());
    }
}

}  // namespace mpad
