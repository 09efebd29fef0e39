#pragma once

// In-process stand-in for MPI. A Fabric connects p Communicator endpoints
// through mailboxes keyed by (src, dst, tag). Sends are buffered: the
// payload is copied into a message at send time, so a rank may post all of
// its sends before receiving anything, even when the receive regions alias
// the send regions.
//
// FabricMode::Threaded runs one OS thread per rank. FabricMode::Serial also
// gives each rank a thread but lets exactly one run at a time: a rank keeps
// the turn until it blocks or finishes, then the turn passes to the next
// runnable rank in round-robin order. The schedule is therefore fixed and
// runs are bit-reproducible.

#include "tfft/fft_core.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <tuple>
#include <vector>

namespace tfft {

/// Strided region in complex-element units, shaped like a vector derived
/// datatype: `count` blocks of `block_length` contiguous elements whose
/// starts are `stride` apart, beginning at `base_offset`.
struct LayoutDescriptor {
    std::size_t count = 1;
    std::size_t block_length = 1;
    std::ptrdiff_t stride = 1;
    std::ptrdiff_t base_offset = 0;

    std::size_t element_count() const noexcept { return count * block_length; }

    static LayoutDescriptor contiguous(std::size_t n, std::ptrdiff_t base = 0)
    {
        return {1, n, static_cast<std::ptrdiff_t>(n), base};
    }

    friend bool operator==(const LayoutDescriptor&, const LayoutDescriptor&) = default;
};

/// Throws LayoutError if blocks overlap or leave [0, buffer_size).
void check_descriptor(const LayoutDescriptor& desc, std::size_t buffer_size);

/// Copies the described region, in enumeration order, into `out`.
void gather(std::span<const Complex> buf, const LayoutDescriptor& desc, std::span<Complex> out);
/// Inverse of gather.
void scatter(std::span<const Complex> in, const LayoutDescriptor& desc, std::span<Complex> buf);

/// Byte traffic of data-movement passes. bytes_local records rank-local
/// copies that never cross the fabric (the self block).
struct CopyCounter {
    std::uint64_t bytes_packed = 0;
    std::uint64_t bytes_wire = 0;
    std::uint64_t bytes_unpacked = 0;
    std::uint64_t bytes_local = 0;

    /// Pack + wire + unpack, the per-exchange copy work.
    std::uint64_t exchange_total() const noexcept
    {
        return bytes_packed + bytes_wire + bytes_unpacked;
    }

    CopyCounter& operator+=(const CopyCounter& o) noexcept
    {
        bytes_packed += o.bytes_packed;
        bytes_wire += o.bytes_wire;
        bytes_unpacked += o.bytes_unpacked;
        bytes_local += o.bytes_local;
        return *this;
    }
    friend CopyCounter operator+(CopyCounter a, const CopyCounter& b) noexcept { return a += b; }
    friend CopyCounter operator-(const CopyCounter& a, const CopyCounter& b) noexcept
    {
        return {a.bytes_packed - b.bytes_packed, a.bytes_wire - b.bytes_wire,
                a.bytes_unpacked - b.bytes_unpacked, a.bytes_local - b.bytes_local};
    }
    friend bool operator==(const CopyCounter&, const CopyCounter&) = default;
};

inline constexpr std::uint64_t kComplexBytes = sizeof(Complex);

enum class FabricMode { Threaded, Serial };
enum class CommPattern { Pairwise, Collective };
/// Whether all_to_all copies the rank's own block locally or leaves it.
enum class SelfBlock { Copy, Skip };

const char* to_string(FabricMode mode) noexcept;
const char* to_string(CommPattern pattern) noexcept;

struct FabricOptions {
    FabricMode mode = FabricMode::Threaded;
    /// Threaded mode only: each send/recv first sleeps a random duration in
    /// [0, max_jitter]. Used to shake out ordering assumptions in tests.
    std::chrono::microseconds max_jitter{0};
    std::uint64_t jitter_seed = 0;
};

class Fabric;

/// One rank's view of the fabric. Confined to that rank's thread.
class Communicator {
public:
    std::size_t rank() const noexcept { return rank_; }
    std::size_t size() const noexcept;

    void send(std::size_t dest, std::uint64_t tag, std::vector<Complex> payload);
    std::vector<Complex> recv(std::size_t src, std::uint64_t tag);

    void send_strided(std::size_t dest, std::uint64_t tag, std::span<const Complex> buf,
                      const LayoutDescriptor& desc);
    /// ProtocolError if the arriving message does not hold desc.element_count() elements.
    void recv_strided(std::size_t src, std::uint64_t tag, std::span<Complex> buf,
                      const LayoutDescriptor& desc);

    /// Every rank sends region send_descs[d] of send_buf to rank d and
    /// receives the block from rank s into region recv_descs[s] of recv_buf.
    /// send_buf and recv_buf may alias. Collective: all ranks must call it
    /// with the same tag.
    void all_to_all(std::uint64_t tag, std::span<const Complex> send_buf,
                    std::span<const LayoutDescriptor> send_descs, std::span<Complex> recv_buf,
                    std::span<const LayoutDescriptor> recv_descs, CommPattern pattern,
                    SelfBlock self);

    void barrier(std::uint64_t tag);

    /// Fresh tag for the next collective. Ranks that issue collectives in
    /// the same order draw identical tags.
    std::uint64_t next_tag() noexcept { return next_tag_++; }

    const CopyCounter& counters() const noexcept { return counters_; }

private:
    friend class Fabric;
    Communicator(Fabric& fabric, std::size_t rank, std::uint64_t jitter_seed);

    void jitter();
    void check_peer(std::size_t peer) const;

    Fabric* fabric_;
    std::size_t rank_;
    std::uint64_t next_tag_ = 0;
    CopyCounter counters_;
    std::mt19937_64 jitter_rng_;
};

class Fabric {
public:
    Fabric(std::size_t p, FabricOptions options = {});
    Fabric(const Fabric&) = delete;
    Fabric& operator=(const Fabric&) = delete;

    std::size_t size() const noexcept { return endpoints_.size(); }
    const FabricOptions& options() const noexcept { return options_; }
    Communicator& endpoint(std::size_t rank);

    /// Runs `fn` on every rank and joins. Rethrows the first rank failure;
    /// a rank left waiting on a failed or finished peer gets TransportError.
    /// Serial mode endpoints may only be driven through run().
    void run(const std::function<void(Communicator&)>& fn);

private:
    friend class Communicator;

    struct Wait {
        enum class Kind { None, Message, Collective } kind = Kind::None;
        std::size_t src = 0;
        std::uint64_t tag = 0;
    };
    struct Round {
        std::vector<std::vector<Complex>> slots; // [src * p + dst]
        std::size_t deposited = 0;
        std::size_t collected = 0;
    };
    using Key = std::tuple<std::size_t, std::size_t, std::uint64_t>; // src, dst, tag

    bool satisfied(std::size_t rank, const Wait& w) const;
    bool runnable(std::size_t rank) const;
    void block(std::unique_lock<std::mutex>& lock, std::size_t rank, Wait w);
    void pass_turn(std::size_t from);
    void detect_deadlock();
    void fail(const char* why);

    void post(std::size_t src, std::size_t dst, std::uint64_t tag, std::vector<Complex> payload);
    std::vector<Complex> take(std::size_t src, std::size_t dst, std::uint64_t tag);
    void deposit(std::size_t rank, std::uint64_t tag, std::vector<std::vector<Complex>> blocks);
    std::vector<std::vector<Complex>> collect(std::size_t rank, std::uint64_t tag);

    FabricOptions options_;
    std::vector<std::unique_ptr<Communicator>> endpoints_;

    std::mutex mutex_;
    std::condition_variable cv_;
    std::map<Key, std::deque<std::vector<Complex>>> mailboxes_;
    std::map<std::uint64_t, Round> rounds_;
    std::vector<Wait> waits_;
    std::vector<bool> done_;
    bool running_ = false;
    bool failed_ = false;
    const char* failure_ = "";
    std::size_t turn_ = 0;
};

/// Creates p connected endpoints sharing one fabric. ConfigError if p < 1.
std::unique_ptr<Fabric> make_communicators(std::size_t p, FabricMode mode);

} // namespace tfft
