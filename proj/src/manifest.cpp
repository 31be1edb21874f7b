#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "spillnet/app.hpp"

namespace spillnet::app {

namespace {

constexpr const char* kCodeVersion = "0.1.0";

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw_data("manifest", "sha256 init failed");
        }
    }
    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        std::string out;
        char buf[3];
        for (unsigned int i = 0; i < len; ++i) {
            std::snprintf(buf, sizeof buf, "%02x", md[i]);
            out += buf;
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string sha256_bytes(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw_data("manifest", path.string() + ": cannot open for hashing");
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (is) {
        is.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(is.gcount()));
    }
    return h.hex();
}

void record_stage(const RunConfig& cfg, const std::string& stage, nlohmann::json stage_record) {
    const auto path = cfg.output_dir / "manifest.json";
    nlohmann::json manifest = nlohmann::json::object();
    if (std::filesystem::exists(path)) {
        std::ifstream is(path);
        try {
            manifest = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception&) {
            manifest = nlohmann::json::object();
        }
    }
    manifest["code_version"] = kCodeVersion;
    manifest["config"] = {{"path", cfg.config_path.string()}, {"sha256", cfg.config_sha256}};
    stage_record["finished_at"] = utc_now();
    manifest["stages"][stage] = std::move(stage_record);

    std::ofstream os(path);
    if (!os) throw_data("manifest", path.string() + ": cannot write");
    os << manifest.dump(2) << '\n';
}

}  // namespace spillnet::app
