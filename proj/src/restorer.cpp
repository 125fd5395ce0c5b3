#include "sglc/restorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>
#include <utility>

#include <csignal>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sglc/image.hpp"
#include "sglc/io.hpp"
#include "sglc/kernels.hpp"

namespace sglc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

class IdentityRestorer final : public Restorer {
public:
    ImageBuffer restore(const ImageBuffer& patch, const PatchContext&) const override {
        return patch;
    }
};

class BorderDamageRestorer final : public Restorer {
public:
    BorderDamageRestorer(int width, float value) : width_(width), value_(value) {
        require(width >= 0, "border_damage_restorer: negative width");
    }

    ImageBuffer restore(const ImageBuffer& patch, const PatchContext&) const override {
        const int side = std::min(patch.height(), patch.width());
        if (width_ >= (side + 1) / 2)
            throw RestorerError("border_damage_restorer: frame width " +
                                std::to_string(width_) + " too large for patch side " +
                                std::to_string(side));
        ImageBuffer out = patch;
        for (int y = 0; y < out.height(); ++y) {
            const bool edge_row = y < width_ || y >= out.height() - width_;
            for (int x = 0; x < out.width(); ++x) {
                if (!edge_row && x >= width_ && x < out.width() - width_) continue;
                for (int c = 0; c < out.channels(); ++c) out.at(y, x, c) = value_;
            }
        }
        return out;
    }

private:
    int width_;
    float value_;
};

class HazeOracleRestorer final : public Restorer {
public:
    explicit HazeOracleRestorer(HazeOracleParams params) : p_(std::move(params)) {
        require(!p_.transmission.empty(), "haze oracle: missing transmission map");
        require(p_.transmission.channels() == 1,
                "haze oracle: transmission map must be single channel");
        require(p_.min_transmission > 0.0f, "haze oracle: t floor must be > 0");
        const float* t = p_.transmission.data();
        for (std::size_t i = 0; i < p_.transmission.sample_count(); ++i) {
            require(t[i] >= p_.min_transmission,
                    "haze oracle: transmission below the conditioning floor");
            require(t[i] <= 1.0f, "haze oracle: transmission above 1");
        }
        require(!p_.atmospheric_light.empty(),
                "haze oracle: missing atmospheric light");
        for (float a : p_.atmospheric_light)
            require(a >= 0.0f && a <= 1.0f,
                    "haze oracle: atmospheric light must be in [0,1]");
    }

    int channels() const override {
        return static_cast<int>(p_.atmospheric_light.size());
    }

    ImageBuffer restore(const ImageBuffer& patch, const PatchContext& ctx) const override {
        const int c = patch.channels();
        if (c != channels())
            throw RestorerError("haze oracle: patch channels do not match light");

        const int th = p_.transmission.height();
        const int tw = p_.transmission.width();
        const std::size_t n = patch.sample_count();
        std::vector<float> trans(n);
        std::vector<float> light(n);
        for (int y = 0; y < patch.height(); ++y) {
            const int sy = clamp_index(ctx.y0 + y * ctx.step_y, th);
            for (int x = 0; x < patch.width(); ++x) {
                const int sx = clamp_index(ctx.x0 + x * ctx.step_x, tw);
                const float t = p_.transmission.at(sy, sx, 0);
                const std::size_t base =
                    (static_cast<std::size_t>(y) * patch.width() + x) * c;
                for (int ch = 0; ch < c; ++ch) {
                    trans[base + ch] = t;
                    light[base + ch] = p_.atmospheric_light[ch];
                }
            }
        }
        ImageBuffer out(patch.height(), patch.width(), c);
        kernels::active().haze_invert(out.data(), patch.data(), trans.data(),
                                      light.data(), n);
        return out;
    }

private:
    HazeOracleParams p_;
};

class LeWinRestorer final : public Restorer {
public:
    explicit LeWinRestorer(const LeWinConfig& cfg)
        : cfg_(cfg), weights_(LeWinWeights::seeded(cfg)) {}

    int channels() const override { return cfg_.channels; }

    ImageBuffer restore(const ImageBuffer& patch, const PatchContext&) const override {
        if (patch.channels() != cfg_.channels)
            throw RestorerError("lewin restorer: patch channels do not match config");
        if (patch.height() % cfg_.window != 0 || patch.width() % cfg_.window != 0)
            throw RestorerError("lewin restorer: patch side not divisible by window");

        FeatureMap fm(patch.height(), patch.width(), patch.channels());
        std::copy(patch.data(), patch.data() + patch.sample_count(), fm.values.begin());
        const FeatureMap out = lewin_forward(fm, cfg_, weights_);
        ImageBuffer result(patch.height(), patch.width(), patch.channels());
        std::copy(out.values.begin(), out.values.end(), result.data());
        return result;
    }

private:
    LeWinConfig cfg_;
    LeWinWeights weights_;
};

void write_all(int fd, const std::uint8_t* data, std::size_t size, bool& ok) {
    std::size_t done = 0;
    while (done < size) {
        const ssize_t w = ::write(fd, data + done, size - done);
        if (w <= 0) {
            ok = false;
            return;
        }
        done += static_cast<std::size_t>(w);
    }
    ok = true;
}

bool read_all(int fd, std::uint8_t* data, std::size_t size) {
    std::size_t done = 0;
    while (done < size) {
        const ssize_t r = ::read(fd, data + done, size - done);
        if (r <= 0) return false;
        done += static_cast<std::size_t>(r);
    }
    return true;
}

class ProcessRestorer final : public Restorer {
public:
    explicit ProcessRestorer(std::string command) : command_(std::move(command)) {
        require(!command_.empty(), "process_restorer: empty command");
        // A dead child must surface as a read/write error, not SIGPIPE.
        std::signal(SIGPIPE, SIG_IGN);

        int to_child[2];
        int from_child[2];
        if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
            throw RestorerError("process_restorer: pipe() failed");

        pid_ = ::fork();
        if (pid_ < 0) throw RestorerError("process_restorer: fork() failed");
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
    }

    ~ProcessRestorer() override {
        if (write_fd_ >= 0) ::close(write_fd_);
        if (read_fd_ >= 0) ::close(read_fd_);
        if (pid_ > 0) {
            int status = 0;
            ::waitpid(pid_, &status, 0);
        }
    }

    ImageBuffer restore(const ImageBuffer& patch, const PatchContext&) const override {
        std::lock_guard<std::mutex> lock(io_mutex_);
        const std::vector<std::uint8_t> request = encode_raw(patch);

        bool write_ok = false;
        std::thread writer([&] { write_all(write_fd_, request.data(), request.size(), write_ok); });

        // The response must announce the same shape as the request; only then
        // is the payload read, so a misbehaving child cannot make us block on
        // a size it never intends to send.
        constexpr std::size_t kHeader = 20;
        std::vector<std::uint8_t> response(request.size());
        const bool header_ok = read_all(read_fd_, response.data(), kHeader) &&
                               std::memcmp(response.data(), request.data(), kHeader) == 0;
        const bool payload_ok =
            header_ok &&
            read_all(read_fd_, response.data() + kHeader, response.size() - kHeader);
        writer.join();

        if (!write_ok)
            throw RestorerError("process restorer: child '" + command_ +
                                "' stopped accepting input");
        if (!header_ok || !payload_ok)
            throw RestorerError("process restorer: child '" + command_ +
                                "' returned a short response or a mismatched header");

        try {
            return decode_raw(response.data(), response.size());
        } catch (const std::exception& e) {
            throw RestorerError("process restorer: bad response from '" + command_ +
                                "': " + e.what());
        }
    }

private:
    std::string command_;
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
    mutable std::mutex io_mutex_;
};

} // namespace

std::unique_ptr<Restorer> identity_restorer() {
    return std::make_unique<IdentityRestorer>();
}

std::unique_ptr<Restorer> border_damage_restorer(int width, float value) {
    return std::make_unique<BorderDamageRestorer>(width, value);
}

std::unique_ptr<Restorer> haze_oracle_restorer(HazeOracleParams params) {
    return std::make_unique<HazeOracleRestorer>(std::move(params));
}

std::unique_ptr<Restorer> lewin_restorer(const LeWinConfig& cfg) {
    cfg.validate();
    return std::make_unique<LeWinRestorer>(cfg);
}

std::unique_ptr<Restorer> process_restorer(std::string command) {
    return std::make_unique<ProcessRestorer>(std::move(command));
}

} // namespace sglc
