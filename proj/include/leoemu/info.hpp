#pragma once

#include <memory>
#include <string>

#include "leoemu/coordinator.hpp"

namespace leoemu {

/// Canonical node syntax of the HTTP API: the DNS name grammar without the
/// ".celestial" suffix ("878.0", "accra.gst").
std::string api_node_name(const Universe& universe, std::uint32_t node);

/// Read-only constellation information service. Handlers read exactly one
/// published EpochState per request (atomic swap, no torn reads); requests
/// before the first publication get 503. Unknown or malformed nodes get 404.
///
/// GET /info                 constellation summary
/// GET /shell/{s}            shell parameters
/// GET /sat/{s}/{id}         positions (geodetic + ECI) and activity
/// GET /gst/{name}           position and current uplinks
/// GET /path/{src}/{dst}     minimum-latency path: hops, latency, bandwidth
class InfoService {
  public:
    explicit InfoService(const Universe& universe);
    ~InfoService();
    InfoService(const InfoService&) = delete;
    InfoService& operator=(const InfoService&) = delete;

    void publish(std::shared_ptr<const EpochState> state);

    /// Binds to an ephemeral port on `host` and serves from a background
    /// thread; returns the port.
    int start(const std::string& host);
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace leoemu
