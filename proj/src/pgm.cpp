#include "kde_edge/pgm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "io_util.hpp"

namespace kde_edge {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("pgm: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

struct Cursor {
    const std::string& data;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }

    void skip_space_and_comments() {
        while (pos < data.size()) {
            const unsigned char c = data[pos];
            if (std::isspace(c)) {
                ++pos;
            } else if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    // Unsigned decimal header/sample field; -1 when absent or non-numeric.
    long read_uint(long limit) {
        skip_space_and_comments();
        if (eof() || !std::isdigit(static_cast<unsigned char>(data[pos])))
            return -1;
        long value = 0;
        while (pos < data.size() &&
               std::isdigit(static_cast<unsigned char>(data[pos]))) {
            value = value * 10 + (data[pos] - '0');
            if (value > limit) return -1;
            ++pos;
        }
        return value;
    }
};

struct PgmHeader {
    bool binary = false;
    int width = 0;
    int height = 0;
    int maxval = 0;
};

PgmHeader parse_header(Cursor& cur, const std::filesystem::path& path) {
    const auto malformed = [&] {
        return std::runtime_error("pgm: malformed header in '" + path.string() +
                                  "'");
    };
    cur.skip_space_and_comments();
    if (cur.data.size() - cur.pos < 2 || cur.data[cur.pos] != 'P') throw malformed();
    const char kind = cur.data[cur.pos + 1];
    if (kind != '2' && kind != '5') throw malformed();
    cur.pos += 2;

    PgmHeader h;
    h.binary = kind == '5';
    const long w = cur.read_uint(1 << 20);
    const long ht = cur.read_uint(1 << 20);
    const long mv = cur.read_uint(1L << 31);
    if (w <= 0 || ht <= 0 || mv <= 0) throw malformed();
    if (mv > 65535)
        throw std::runtime_error("pgm: unsupported maxval in '" + path.string() +
                                 "'");
    h.width = static_cast<int>(w);
    h.height = static_cast<int>(ht);
    h.maxval = static_cast<int>(mv);
    // Exactly one whitespace byte separates the header from the samples.
    if (cur.eof() || !std::isspace(static_cast<unsigned char>(cur.data[cur.pos])))
        throw malformed();
    if (h.binary) ++cur.pos;
    return h;
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
    const std::string data = slurp(path);
    Cursor cur{data};
    const PgmHeader h = parse_header(cur, path);
    if (h.maxval > 255)
        throw std::runtime_error("pgm: maxval over 255 in '" + path.string() +
                                 "' (8-bit loader)");

    GrayImage img{h.width, h.height, {}};
    const std::size_t count = static_cast<std::size_t>(h.width) * h.height;
    img.pixels.resize(count);

    if (h.binary) {
        if (data.size() - cur.pos < count)
            throw std::runtime_error("pgm: truncated pixel data in '" +
                                     path.string() + "'");
        for (std::size_t i = 0; i < count; ++i)
            img.pixels[i] = static_cast<std::uint8_t>(data[cur.pos + i]);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const long v = cur.read_uint(255);
            if (v < 0) {
                cur.skip_space_and_comments();
                if (cur.eof())
                    throw std::runtime_error("pgm: truncated pixel data in '" +
                                             path.string() + "'");
                throw std::runtime_error("pgm: malformed pixel data in '" +
                                         path.string() + "'");
            }
            if (v > h.maxval)
                throw std::runtime_error("pgm: malformed pixel data in '" +
                                         path.string() + "'");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path,
              bool binary) {
    require_valid(image, "save_pgm");
    std::string out;
    out += binary ? "P5\n" : "P2\n";
    out += std::to_string(image.width) + " " + std::to_string(image.height) +
           "\n255\n";
    if (binary) {
        out.append(reinterpret_cast<const char*>(image.pixels.data()),
                   image.pixels.size());
    } else {
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                if (x) out += ' ';
                out += std::to_string(image.at(x, y));
            }
            out += '\n';
        }
    }
    detail::write_file_atomic(path, out);
}

void save_pgm(const EdgeMap& map, const std::filesystem::path& path,
              bool binary) {
    save_pgm(to_gray(map), path, binary);
}

Gray16 load_pgm16(const std::filesystem::path& path) {
    const std::string data = slurp(path);
    Cursor cur{data};
    const PgmHeader h = parse_header(cur, path);
    if (!h.binary || h.maxval < 256)
        throw std::runtime_error("pgm: not a 16-bit binary PGM: '" +
                                 path.string() + "'");

    Gray16 img{h.width, h.height, {}};
    const std::size_t count = static_cast<std::size_t>(h.width) * h.height;
    if (data.size() - cur.pos < count * 2)
        throw std::runtime_error("pgm: truncated pixel data in '" + path.string() +
                                 "'");
    img.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto hi = static_cast<std::uint8_t>(data[cur.pos + 2 * i]);
        const auto lo = static_cast<std::uint8_t>(data[cur.pos + 2 * i + 1]);
        img.samples[i] = static_cast<std::uint16_t>(hi << 8 | lo);
    }
    return img;
}

void save_pgm16(const Gray16& image, const std::filesystem::path& path) {
    if (image.width <= 0 || image.height <= 0 ||
        image.samples.size() !=
            static_cast<std::size_t>(image.width) * image.height)
        throw std::invalid_argument("save_pgm16: invalid image");
    std::string out = "P5\n" + std::to_string(image.width) + " " +
                      std::to_string(image.height) + "\n65535\n";
    out.reserve(out.size() + image.samples.size() * 2);
    for (std::uint16_t s : image.samples) {
        out += static_cast<char>(s >> 8);
        out += static_cast<char>(s & 0xFF);
    }
    detail::write_file_atomic(path, out);
}

}  // namespace kde_edge
