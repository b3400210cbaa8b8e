#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "toricnn/decoder.hpp"
#include "toricnn/io.hpp"
#include "toricnn/training.hpp"

using namespace toricnn;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("base64 round trip") {
    const std::vector<uint8_t> cases[] = {{}, {0x00}, {0x01, 0x02}, {0xff, 0x00, 0xab},
                                          {1, 2, 3, 4, 5, 6, 7}};
    for (const auto& bytes : cases) {
        const std::string enc = base64_encode(bytes.data(), bytes.size());
        CHECK(base64_decode(enc) == bytes);
    }
    Rng rng(9);
    std::vector<uint8_t> blob(1000);
    for (auto& b : blob) b = static_cast<uint8_t>(rng.next() & 0xff);
    CHECK(base64_decode(base64_encode(blob.data(), blob.size())) == blob);
    CHECK_THROWS_AS(base64_decode("@@@"), std::invalid_argument);
}

TEST_CASE("format_double round-trips shortest representations") {
    for (double x : {0.0, 1.0, 0.071, 1e-12, 3.141592653589793, -2.5e17}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("checkpoint save/load reproduces forward outputs bit-exactly") {
    Network net = build_decoder_network(3, 7, 90210);
    net.model_tag = "a";
    net.train_side = 4;
    const std::string path = temp_path("toricnn_test_ckpt.json");
    save_checkpoint(net, path);
    const Network loaded = load_checkpoint(path);

    CHECK(loaded.dim == net.dim);
    CHECK(loaded.model_tag == net.model_tag);
    CHECK(loaded.train_side == net.train_side);
    REQUIRE(loaded.layers.size() == net.layers.size());
    for (size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(loaded.layers[l].kernel == net.layers[l].kernel);
        CHECK(loaded.layers[l].bias == net.layers[l].bias);
    }

    const LatticeGeometry geom(3, 5);
    Rng rng(4);
    const Syndrome s = syndrome_of(sample_error(geom, 0.1, rng));
    const Tensor a = nn_rank_faces(net, geom, s.bits);
    const Tensor b = nn_rank_faces(loaded, geom, s.bits);
    for (size_t i = 0; i < a.v.size(); ++i) CHECK(a.v[i] == b.v[i]);

    // Saving again produces a byte-identical file.
    const std::string path2 = temp_path("toricnn_test_ckpt2.json");
    save_checkpoint(loaded, path2);
    CHECK(read_text_file(path) == read_text_file(path2));

    const std::string summary = checkpoint_summary(path);
    CHECK(summary.find("kernel_b64") == std::string::npos);
    CHECK(summary.find("checksum") != std::string::npos);

    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("checkpoint corruption and wrong files are rejected") {
    const std::string path = temp_path("toricnn_bad_ckpt.json");
    write_text_file(path, "{\"format\":\"other\"}");
    CHECK_THROWS(load_checkpoint(path));

    Network net = build_decoder_network(3, 3, 8);
    save_checkpoint(net, path);
    std::string body = read_text_file(path);
    const auto pos = body.find("\"checksum\": \"");
    REQUIRE(pos != std::string::npos);
    body[pos + 13] = body[pos + 13] == 'a' ? 'b' : 'a';
    write_text_file(path, body);
    CHECK_THROWS_WITH_AS(load_checkpoint(path), "checkpoint checksum mismatch", std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("fnv1a is stable") {
    const uint8_t data[] = {'a', 'b', 'c'};
    CHECK(hex64(fnv1a64(data, 3)) == "e71fa2190541574b");
}
