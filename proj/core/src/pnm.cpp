#include "sid/pnm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sid {

PnmError::PnmError(const std::string& what, std::size_t byte_offset_)
    : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset_) + ")"),
      byte_offset(byte_offset_) {}

namespace {

bool is_pnm_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

struct Reader {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }
    std::uint8_t peek() const { return data[pos]; }

    void skip_space_and_comments() {
        for (;;) {
            while (!eof() && is_pnm_space(peek())) ++pos;
            if (!eof() && peek() == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    long read_uint(const char* what) {
        skip_space_and_comments();
        if (eof() || peek() < '0' || peek() > '9') {
            throw PnmError(std::string("expected ") + what, pos);
        }
        long value = 0;
        while (!eof() && peek() >= '0' && peek() <= '9') {
            value = value * 10 + (peek() - '0');
            if (value > 1000000000L) {
                throw PnmError(std::string(what) + " out of range", pos);
            }
            ++pos;
        }
        return value;
    }
};

}  // namespace

Signal read_pnm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw PnmError("not a PNM stream (missing magic)", 0);
    }
    const char magic = static_cast<char>(bytes[1]);
    if (magic != '2' && magic != '3' && magic != '5' && magic != '6') {
        throw PnmError(std::string("unsupported PNM type P") + magic, 1);
    }
    const bool ascii = magic == '2' || magic == '3';
    const int channels = (magic == '3' || magic == '6') ? 3 : 1;

    Reader r{bytes, 2};
    const long width = r.read_uint("width");
    const long height = r.read_uint("height");
    const long maxval = r.read_uint("maxval");
    if (width <= 0 || height <= 0) {
        throw PnmError("dimensions must be positive", r.pos);
    }
    if (maxval == 0) {
        throw PnmError("maxval must not be 0", r.pos);
    }
    if (maxval > 65535) {
        throw PnmError("maxval exceeds 65535", r.pos);
    }

    const std::size_t count =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
    std::vector<double> values(count);
    const double scale = 1.0 / static_cast<double>(maxval);

    if (ascii) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = r.pos;
            const long v = r.read_uint("sample");
            if (v > maxval) {
                throw PnmError("sample " + std::to_string(v) + " exceeds maxval " +
                                   std::to_string(maxval),
                               at);
            }
            values[i] = static_cast<double>(v) * scale;
        }
    } else {
        if (r.eof() || !is_pnm_space(r.peek())) {
            throw PnmError("expected single whitespace after maxval", r.pos);
        }
        ++r.pos;
        const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
        const std::size_t need = count * bytes_per_sample;
        const std::size_t have = bytes.size() - r.pos;
        if (have < need) {
            throw PnmError("truncated payload: expected " + std::to_string(need) +
                               " bytes, got " + std::to_string(have),
                           r.pos);
        }
        for (std::size_t i = 0; i < count; ++i) {
            long v;
            if (bytes_per_sample == 1) {
                v = bytes[r.pos++];
            } else {
                v = static_cast<long>(bytes[r.pos]) << 8 | bytes[r.pos + 1];
                r.pos += 2;
            }
            if (v > maxval) {
                throw PnmError("sample " + std::to_string(v) + " exceeds maxval " +
                                   std::to_string(maxval),
                               r.pos - bytes_per_sample);
            }
            values[i] = static_cast<double>(v) * scale;
        }
    }
    return make_signal(std::move(values),
                       Shape{static_cast<int>(height), static_cast<int>(width), channels});
}

std::vector<std::uint8_t> write_pnm(const Signal& sig, bool binary, int maxval) {
    if (sig.shape.channels != 1 && sig.shape.channels != 3) {
        throw std::invalid_argument("write_pnm: unsupported channel count " +
                                    std::to_string(sig.shape.channels));
    }
    if (maxval < 1 || maxval > 65535) {
        throw std::invalid_argument("write_pnm: maxval must be in [1, 65535]");
    }
    const bool color = sig.shape.channels == 3;
    const char magic = binary ? (color ? '6' : '5') : (color ? '3' : '2');

    std::string header;
    header += 'P';
    header += magic;
    header += '\n';
    header += std::to_string(sig.shape.width) + " " + std::to_string(sig.shape.height);
    header += '\n';
    header += std::to_string(maxval);
    header += '\n';

    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + sig.size() * (binary ? (maxval > 255 ? 2 : 1) : 6));

    auto quantize = [maxval](double v) -> long {
        const double clamped = std::clamp(v, 0.0, 1.0);
        return std::clamp(std::lround(clamped * maxval), 0L, static_cast<long>(maxval));
    };

    if (binary) {
        const bool wide = maxval > 255;
        for (std::size_t i = 0; i < sig.size(); ++i) {
            const long q = quantize(sig[i]);
            if (wide) out.push_back(static_cast<std::uint8_t>(q >> 8));
            out.push_back(static_cast<std::uint8_t>(q & 0xff));
        }
    } else {
        // Keep text lines comfortably short for other readers.
        int on_line = 0;
        for (std::size_t i = 0; i < sig.size(); ++i) {
            const std::string token = std::to_string(quantize(sig[i]));
            out.insert(out.end(), token.begin(), token.end());
            ++on_line;
            const bool line_break = on_line == 12 || i + 1 == sig.size();
            out.push_back(line_break ? '\n' : ' ');
            if (line_break) on_line = 0;
        }
    }
    return out;
}

Signal read_pnm_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("read_pnm_file: cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return read_pnm(bytes);
}

void write_pnm_file(const std::filesystem::path& path, const Signal& sig, bool binary,
                    int maxval) {
    const std::vector<std::uint8_t> bytes = write_pnm(sig, binary, maxval);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("write_pnm_file: cannot open " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("write_pnm_file: short write to " + path.string());
    }
}

}  // namespace sid
