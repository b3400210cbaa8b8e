#include "toricnn/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace toricnn {

namespace {
constexpr char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}
} // namespace

std::string base64_encode(const uint8_t* data, size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= len; i += 3) {
        const uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(kB64Chars[(v >> 18) & 63]);
        out.push_back(kB64Chars[(v >> 12) & 63]);
        out.push_back(kB64Chars[(v >> 6) & 63]);
        out.push_back(kB64Chars[v & 63]);
    }
    if (i < len) {
        uint32_t v = data[i] << 16;
        if (i + 1 < len) v |= data[i + 1] << 8;
        out.push_back(kB64Chars[(v >> 18) & 63]);
        out.push_back(kB64Chars[(v >> 12) & 63]);
        out.push_back(i + 1 < len ? kB64Chars[(v >> 6) & 63] : '=');
        out.push_back('=');
    }
    return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
    std::vector<uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    uint32_t buf = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = b64_value(c);
        if (v < 0) throw std::invalid_argument("invalid base64 input");
        buf = (buf << 6) | static_cast<uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<uint8_t>((buf >> bits) & 0xff));
        }
    }
    return out;
}

uint64_t fnv1a64(const uint8_t* data, size_t len, uint64_t seed) {
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t x) {
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[x & 0xf];
        x >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::string doubles_to_b64(const std::vector<double>& v) {
    // Little-endian 64-bit floats; this code targets little-endian hosts.
    return base64_encode(reinterpret_cast<const uint8_t*>(v.data()), v.size() * sizeof(double));
}

std::vector<double> b64_to_doubles(const std::string& text, size_t expected) {
    const auto bytes = base64_decode(text);
    if (bytes.size() != expected * sizeof(double))
        throw std::runtime_error("checkpoint payload has unexpected length");
    std::vector<double> v(expected);
    std::memcpy(v.data(), bytes.data(), bytes.size());
    return v;
}

uint64_t params_checksum(const Network& net) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& l : net.layers) {
        h = fnv1a64(reinterpret_cast<const uint8_t*>(l.kernel.data()),
                    l.kernel.size() * sizeof(double), h);
        h = fnv1a64(reinterpret_cast<const uint8_t*>(l.bias.data()), l.bias.size() * sizeof(double),
                    h);
    }
    return h;
}

} // namespace

std::string checkpoint_checksum(const Network& net) { return hex64(params_checksum(net)); }

void save_checkpoint(const Network& net, const std::string& path) {
    nlohmann::json j;
    j["format"] = "toricnn-net";
    j["format_version"] = 1;
    j["dim"] = net.dim;
    j["model"] = net.model_tag;
    j["train_side"] = net.train_side;
    j["softmax_head"] = net.softmax_head;
    j["channel_convention"] = channel_convention();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers) {
        nlohmann::json jl;
        jl["kernel_side"] = l.spec.kernel_side;
        jl["in_channels"] = l.spec.in_channels;
        jl["out_channels"] = l.spec.out_channels;
        jl["activation"] = activation_name(l.spec.act);
        jl["kernel_b64"] = doubles_to_b64(l.kernel);
        jl["bias_b64"] = doubles_to_b64(l.bias);
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    j["checksum"] = checkpoint_checksum(net);
    write_text_file(path, j.dump(1));
}

Network load_checkpoint(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    if (j.value("format", "") != "toricnn-net") throw std::runtime_error("not a toricnn checkpoint: " + path);
    if (j.value("format_version", 0) != 1) throw std::runtime_error("unsupported checkpoint version");
    if (j.value("channel_convention", "") != channel_convention())
        throw std::runtime_error("checkpoint channel convention mismatch");
    Network net;
    net.dim = j.at("dim").get<int>();
    net.model_tag = j.value("model", "");
    net.train_side = j.value("train_side", 0);
    net.softmax_head = j.value("softmax_head", true);
    for (const auto& jl : j.at("layers")) {
        ConvLayer l;
        l.spec.kernel_side = jl.at("kernel_side").get<int>();
        l.spec.in_channels = jl.at("in_channels").get<int>();
        l.spec.out_channels = jl.at("out_channels").get<int>();
        l.spec.act = activation_from_name(jl.at("activation").get<std::string>());
        l.kernel = b64_to_doubles(jl.at("kernel_b64").get<std::string>(),
                                  static_cast<size_t>(l.kernel_size(net.dim)));
        l.bias = b64_to_doubles(jl.at("bias_b64").get<std::string>(),
                                static_cast<size_t>(l.spec.out_channels));
        net.layers.push_back(std::move(l));
    }
    const std::string stored = j.value("checksum", "");
    if (stored != checkpoint_checksum(net)) throw std::runtime_error("checkpoint checksum mismatch");
    return net;
}

std::string checkpoint_summary(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    j.erase("layers");
    nlohmann::json j2 = nlohmann::json::parse(read_text_file(path));
    nlohmann::json layers = nlohmann::json::array();
    for (auto& jl : j2.at("layers")) {
        jl.erase("kernel_b64");
        jl.erase("bias_b64");
        layers.push_back(jl);
    }
    j["layers"] = layers;
    return j.dump(1);
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << body;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace toricnn
