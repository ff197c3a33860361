#pragma once

#include <memory>
#include <string>

#include "emomem/engine.hpp"

namespace emomem {

// Small HTTP front end over an Engine:
//   POST /retrieve  {character_id, query, strategy?} -> scored fragments
//   POST /chat      {character_id, query, strategy?} -> reply + used ids
//   GET  /characters -> profile catalog
//   GET  /healthz    -> ok
// Errors: 400 malformed body, 404 unknown character, 503 backend down.
class HttpService {
public:
    explicit HttpService(Engine& engine);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    // Binds and serves on a background thread; port 0 picks an ephemeral
    // port. Returns the bound port.
    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace emomem
