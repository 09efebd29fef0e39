#include "tfft/transport.hpp"

#include "tfft/errors.hpp"

#include <algorithm>
#include <string>
#include <thread>

namespace tfft {

void check_descriptor(const LayoutDescriptor& desc, std::size_t buffer_size)
{
    if (desc.count == 0 || desc.block_length == 0)
        throw LayoutError("layout descriptor describes no elements");
    const auto len = static_cast<std::ptrdiff_t>(desc.block_length);
    if (desc.count > 1 && std::abs(desc.stride) < len)
        throw LayoutError("layout descriptor blocks overlap (|stride| " +
                          std::to_string(std::abs(desc.stride)) + " < block_length " +
                          std::to_string(len) + ")");
    const auto last = desc.base_offset + static_cast<std::ptrdiff_t>(desc.count - 1) * desc.stride;
    const auto lo = std::min(desc.base_offset, last);
    const auto hi = std::max(desc.base_offset, last) + len;
    if (lo < 0 || hi > static_cast<std::ptrdiff_t>(buffer_size))
        throw LayoutError("layout descriptor spans [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + ") outside buffer of " +
                          std::to_string(buffer_size));
}

void gather(std::span<const Complex> buf, const LayoutDescriptor& desc, std::span<Complex> out)
{
    auto dst = out.begin();
    for (std::size_t b = 0; b < desc.count; ++b) {
        const auto* src = buf.data() + desc.base_offset + static_cast<std::ptrdiff_t>(b) * desc.stride;
        dst = std::copy_n(src, desc.block_length, dst);
    }
}

void scatter(std::span<const Complex> in, const LayoutDescriptor& desc, std::span<Complex> buf)
{
    auto src = in.begin();
    for (std::size_t b = 0; b < desc.count; ++b) {
        auto* dst = buf.data() + desc.base_offset + static_cast<std::ptrdiff_t>(b) * desc.stride;
        std::copy_n(src, desc.block_length, dst);
        src += static_cast<std::ptrdiff_t>(desc.block_length);
    }
}

const char* to_string(FabricMode mode) noexcept
{
    return mode == FabricMode::Threaded ? "threaded" : "serial";
}

const char* to_string(CommPattern pattern) noexcept
{
    return pattern == CommPattern::Pairwise ? "pairwise" : "collective";
}

// ---------------------------------------------------------------------------
// Communicator

Communicator::Communicator(Fabric& fabric, std::size_t rank, std::uint64_t jitter_seed)
    : fabric_(&fabric), rank_(rank), jitter_rng_(jitter_seed + rank)
{
}

std::size_t Communicator::size() const noexcept { return fabric_->size(); }

void Communicator::check_peer(std::size_t peer) const
{
    if (peer >= size())
        throw TransportError("rank " + std::to_string(peer) + " does not exist (p = " +
                             std::to_string(size()) + ")");
}

void Communicator::jitter()
{
    const auto& opt = fabric_->options();
    if (opt.mode != FabricMode::Threaded || opt.max_jitter.count() <= 0) return;
    std::uniform_int_distribution<long> dist(0, static_cast<long>(opt.max_jitter.count()));
    std::this_thread::sleep_for(std::chrono::microseconds(dist(jitter_rng_)));
}

void Communicator::send(std::size_t dest, std::uint64_t tag, std::vector<Complex> payload)
{
    check_peer(dest);
    jitter();
    counters_.bytes_wire += payload.size() * kComplexBytes;
    fabric_->post(rank_, dest, tag, std::move(payload));
}

std::vector<Complex> Communicator::recv(std::size_t src, std::uint64_t tag)
{
    check_peer(src);
    jitter();
    return fabric_->take(src, rank_, tag);
}

void Communicator::send_strided(std::size_t dest, std::uint64_t tag, std::span<const Complex> buf,
                                const LayoutDescriptor& desc)
{
    check_descriptor(desc, buf.size());
    std::vector<Complex> payload(desc.element_count());
    gather(buf, desc, payload);
    send(dest, tag, std::move(payload));
}

void Communicator::recv_strided(std::size_t src, std::uint64_t tag, std::span<Complex> buf,
                                const LayoutDescriptor& desc)
{
    check_descriptor(desc, buf.size());
    const auto payload = recv(src, tag);
    if (payload.size() != desc.element_count())
        throw ProtocolError("message from rank " + std::to_string(src) + " holds " +
                            std::to_string(payload.size()) + " elements, receive region expects " +
                            std::to_string(desc.element_count()));
    scatter(payload, desc, buf);
}

void Communicator::all_to_all(std::uint64_t tag, std::span<const Complex> send_buf,
                              std::span<const LayoutDescriptor> send_descs,
                              std::span<Complex> recv_buf,
                              std::span<const LayoutDescriptor> recv_descs, CommPattern pattern,
                              SelfBlock self)
{
    const std::size_t p = size();
    if (send_descs.size() != p || recv_descs.size() != p)
        throw ProtocolError("all_to_all needs one send and one receive descriptor per rank");
    for (std::size_t q = 0; q < p; ++q) {
        if (q == rank_ && self == SelfBlock::Skip) continue;
        check_descriptor(send_descs[q], send_buf.size());
        check_descriptor(recv_descs[q], recv_buf.size());
    }

    auto copy_self = [&] {
        if (self == SelfBlock::Skip) return;
        const auto& sd = send_descs[rank_];
        const auto& rd = recv_descs[rank_];
        if (sd.element_count() != rd.element_count())
            throw ProtocolError("self block send/receive sizes differ");
        std::vector<Complex> tmp(sd.element_count());
        gather(send_buf, sd, tmp);
        scatter(tmp, rd, recv_buf);
        counters_.bytes_local += tmp.size() * kComplexBytes;
    };

    if (pattern == CommPattern::Pairwise) {
        for (std::size_t d = 1; d < p; ++d) {
            const std::size_t dst = (rank_ + d) % p;
            send_strided(dst, tag, send_buf, send_descs[dst]);
        }
        copy_self();
        for (std::size_t d = 1; d < p; ++d) {
            const std::size_t src = (rank_ + p - d) % p;
            recv_strided(src, tag, recv_buf, recv_descs[src]);
        }
        return;
    }

    std::vector<std::vector<Complex>> outgoing(p);
    for (std::size_t dst = 0; dst < p; ++dst) {
        if (dst == rank_) continue;
        outgoing[dst].resize(send_descs[dst].element_count());
        gather(send_buf, send_descs[dst], outgoing[dst]);
        counters_.bytes_wire += outgoing[dst].size() * kComplexBytes;
    }
    jitter();
    fabric_->deposit(rank_, tag, std::move(outgoing));
    copy_self();
    auto incoming = fabric_->collect(rank_, tag);
    for (std::size_t src = 0; src < p; ++src) {
        if (src == rank_) continue;
        if (incoming[src].size() != recv_descs[src].element_count())
            throw ProtocolError("collective block from rank " + std::to_string(src) +
                                " has the wrong size");
        scatter(incoming[src], recv_descs[src], recv_buf);
    }
}

void Communicator::barrier(std::uint64_t tag)
{
    fabric_->deposit(rank_, tag, std::vector<std::vector<Complex>>(size()));
    fabric_->collect(rank_, tag);
}

// ---------------------------------------------------------------------------
// Fabric

Fabric::Fabric(std::size_t p, FabricOptions options)
    : options_(options), waits_(p), done_(p, false)
{
    if (p < 1) throw ConfigError("communicator size must be at least 1");
    endpoints_.reserve(p);
    for (std::size_t r = 0; r < p; ++r)
        endpoints_.emplace_back(new Communicator(*this, r, options.jitter_seed));
}

Communicator& Fabric::endpoint(std::size_t rank)
{
    if (rank >= size()) throw TransportError("rank " + std::to_string(rank) + " does not exist");
    return *endpoints_[rank];
}

bool Fabric::satisfied(std::size_t rank, const Wait& w) const
{
    switch (w.kind) {
    case Wait::Kind::None:
        return true;
    case Wait::Kind::Message: {
        const auto it = mailboxes_.find(Key{w.src, rank, w.tag});
        return it != mailboxes_.end() && !it->second.empty();
    }
    case Wait::Kind::Collective: {
        const auto it = rounds_.find(w.tag);
        return it != rounds_.end() && it->second.deposited == size();
    }
    }
    return false;
}

bool Fabric::runnable(std::size_t rank) const
{
    return !done_[rank] && satisfied(rank, waits_[rank]);
}

void Fabric::fail(const char* why)
{
    failed_ = true;
    failure_ = why;
    cv_.notify_all();
}

void Fabric::pass_turn(std::size_t from)
{
    const std::size_t p = size();
    for (std::size_t d = 1; d <= p; ++d) {
        const std::size_t r = (from + d) % p;
        if (runnable(r)) {
            turn_ = r;
            cv_.notify_all();
            return;
        }
    }
    if (std::find(done_.begin(), done_.end(), false) != done_.end())
        fail("deadlock: every live rank is waiting for a message that was never sent");
}

void Fabric::detect_deadlock()
{
    bool any_live = false;
    for (std::size_t r = 0; r < size(); ++r) {
        if (runnable(r)) return;
        any_live = any_live || !done_[r];
    }
    if (any_live) fail("deadlock: every live rank is waiting for a message that was never sent");
}

void Fabric::block(std::unique_lock<std::mutex>& lock, std::size_t rank, Wait w)
{
    if (failed_) throw TransportError(failure_);
    if (satisfied(rank, w)) return;
    const bool serial = options_.mode == FabricMode::Serial;
    if (serial && !running_)
        throw TransportError("serial endpoints must be driven through Fabric::run");

    waits_[rank] = w;
    if (running_) {
        if (serial)
            pass_turn(rank);
        else
            detect_deadlock();
    }
    cv_.wait(lock, [&] {
        return failed_ || (satisfied(rank, w) && (!serial || turn_ == rank));
    });
    waits_[rank] = Wait{};
    if (failed_) throw TransportError(failure_);
}

void Fabric::post(std::size_t src, std::size_t dst, std::uint64_t tag, std::vector<Complex> payload)
{
    std::lock_guard lock(mutex_);
    if (failed_) throw TransportError(failure_);
    mailboxes_[Key{src, dst, tag}].push_back(std::move(payload));
    cv_.notify_all();
}

std::vector<Complex> Fabric::take(std::size_t src, std::size_t dst, std::uint64_t tag)
{
    std::unique_lock lock(mutex_);
    block(lock, dst, Wait{Wait::Kind::Message, src, tag});
    auto it = mailboxes_.find(Key{src, dst, tag});
    auto payload = std::move(it->second.front());
    it->second.pop_front();
    if (it->second.empty()) mailboxes_.erase(it);
    return payload;
}

void Fabric::deposit(std::size_t rank, std::uint64_t tag, std::vector<std::vector<Complex>> blocks)
{
    const std::size_t p = size();
    std::lock_guard lock(mutex_);
    if (failed_) throw TransportError(failure_);
    auto& round = rounds_[tag];
    if (round.slots.empty()) round.slots.resize(p * p);
    for (std::size_t dst = 0; dst < p; ++dst) round.slots[rank * p + dst] = std::move(blocks[dst]);
    ++round.deposited;
    cv_.notify_all();
}

std::vector<std::vector<Complex>> Fabric::collect(std::size_t rank, std::uint64_t tag)
{
    const std::size_t p = size();
    std::unique_lock lock(mutex_);
    block(lock, rank, Wait{Wait::Kind::Collective, 0, tag});
    auto it = rounds_.find(tag);
    std::vector<std::vector<Complex>> incoming(p);
    for (std::size_t src = 0; src < p; ++src)
        incoming[src] = std::move(it->second.slots[src * p + rank]);
    if (++it->second.collected == p) rounds_.erase(it);
    return incoming;
}

void Fabric::run(const std::function<void(Communicator&)>& fn)
{
    const std::size_t p = size();
    {
        std::lock_guard lock(mutex_);
        std::fill(done_.begin(), done_.end(), false);
        std::fill(waits_.begin(), waits_.end(), Wait{});
        mailboxes_.clear();
        rounds_.clear();
        failed_ = false;
        failure_ = "";
        turn_ = 0;
        running_ = true;
    }
    const bool serial = options_.mode == FabricMode::Serial;

    std::vector<std::exception_ptr> errors(p);
    std::vector<bool> induced(p, false);
    std::vector<std::thread> threads;
    threads.reserve(p);
    for (std::size_t r = 0; r < p; ++r) {
        threads.emplace_back([&, r] {
            bool start = true;
            if (serial) {
                std::unique_lock lock(mutex_);
                cv_.wait(lock, [&] { return turn_ == r || failed_; });
                start = !failed_;
            }
            if (start) {
                try {
                    fn(*endpoints_[r]);
                } catch (...) {
                    errors[r] = std::current_exception();
                    std::lock_guard lock(mutex_);
                    induced[r] = failed_;
                }
            }
            std::lock_guard lock(mutex_);
            done_[r] = true;
            waits_[r] = Wait{};
            if (serial) {
                if (turn_ == r) pass_turn(r);
            } else {
                detect_deadlock();
            }
            cv_.notify_all();
        });
    }
    for (auto& t : threads) t.join();

    {
        std::lock_guard lock(mutex_);
        running_ = false;
        mailboxes_.clear();
        rounds_.clear();
    }
    for (std::size_t r = 0; r < p; ++r)
        if (errors[r] && !induced[r]) std::rethrow_exception(errors[r]);
    for (std::size_t r = 0; r < p; ++r)
        if (errors[r]) std::rethrow_exception(errors[r]);
    if (failed_) throw TransportError(failure_);
}

std::unique_ptr<Fabric> make_communicators(std::size_t p, FabricMode mode)
{
    if (p < 1) throw ConfigError("communicator size must be at least 1");
    return std::make_unique<Fabric>(p, FabricOptions{mode});
}

} // namespace tfft
