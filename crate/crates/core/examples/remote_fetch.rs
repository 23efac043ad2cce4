//! Remote search through a canned transport, then a second call served from
//! the cache without a token.

use std::sync::atomic::{AtomicUsize, Ordering};

use exrec::corpus::remote::{HttpResponse, Transport};
use exrec::corpus::{fetch_remote, RemoteConfig};
use exrec::query::SearchQuery;

struct Canned {
    requests: AtomicUsize,
}

impl Transport for Canned {
    fn get(&self, url: &str, _token: &str, _accept: &str) -> exrec::Result<HttpResponse> {
        self.requests.fetch_add(1, Ordering::SeqCst);
        let body = if url.contains("/search/code") {
            r#"{"items":[
                {"path":"src/Fetch.java","url":"https://files/1","repository":{"full_name":"acme/net"}},
                {"path":"src/Ping.java","url":"https://files/2","repository":{"full_name":"acme/net"}}
            ]}"#
        } else if url.ends_with("/1") {
            "try { new URL(u).openStream(); } catch (IOException e) { log(e); }"
        } else {
            "try { ping(); } catch (IOException e) { retry(); }"
        };
        Ok(HttpResponse {
            status: 200,
            body: body.as_bytes().to_vec(),
            retry_after: None,
        })
    }
}

fn main() -> exrec::Result<()> {
    let cache = std::env::temp_dir().join(format!("exrec-example-{}", std::process::id()));
    let query = SearchQuery::new("IOException", "URL");
    let orgs = vec!["acme".to_string()];
    let transport = Canned {
        requests: AtomicUsize::new(0),
    };

    let cold = RemoteConfig {
        token: Some("example".into()),
        cache_dir: Some(cache.clone()),
        ..RemoteConfig::default()
    };
    let first = fetch_remote(&query, &orgs, 10, &cold, &transport)?;
    println!("cold: {} candidates, {} requests", first.candidates.len(), transport.requests.load(Ordering::SeqCst));
    for c in &first.candidates {
        println!("  {}  {}", c.id, c.origin);
    }

    let warm = RemoteConfig {
        token: None,
        ..cold
    };
    let second = fetch_remote(&query, &orgs, 10, &warm, &transport)?;
    println!(
        "warm: {} candidates from cache: {}, {} requests in total",
        second.candidates.len(),
        second.from_cache,
        transport.requests.load(Ordering::SeqCst)
    );
    let _ = std::fs::remove_dir_all(&cache);
    Ok(())
}
