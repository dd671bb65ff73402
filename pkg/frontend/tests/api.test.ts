import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, Superseded } from "../src/api.js";
import { runFixture, scriptedFetch } from "./fixtures.js";

describe("api client", () => {
  it("posts JSON bodies and parses payloads", async () => {
    const scripted = scriptedFetch();
    const api = new ApiClient("", scripted.fetch);
    const resp = await api.run({
      mode: "physical",
      theta: 1.2,
      phi: 0,
      ns: 1,
      pulse: { sx: "square", cz: "square", measure: "square" },
    });
    expect(resp.fidelity).toBe(runFixture().fidelity);
    expect(scripted.calls.at(-1)?.path).toBe("/api/run");
    expect((scripted.calls.at(-1)?.body as { theta: number }).theta).toBe(1.2);
  });

  it("maps error payloads onto ApiError with the server code", async () => {
    const impl = async () =>
      new Response(JSON.stringify({ error: "no_embedding", detail: "nope" }), { status: 400 });
    const api = new ApiClient("", impl as typeof fetch);
    await expect(api.filter({})).rejects.toMatchObject({ code: "no_embedding", status: 400 });
    await expect(api.filter({})).rejects.toBeInstanceOf(ApiError);
  });

  it("drops superseded responses (latest wins)", async () => {
    let release: (() => void) | undefined;
    const gate = new Promise<void>((resolve) => (release = resolve));
    let call = 0;
    const impl = async () => {
      call += 1;
      if (call === 1) await gate; // first request resolves last
      return new Response(JSON.stringify(runFixture({ ns: call })), { status: 200 });
    };
    const api = new ApiClient("", impl as typeof fetch);
    const body = {
      mode: "physical",
      theta: 1,
      phi: 0,
      ns: 1,
      pulse: { sx: "square", cz: "square", measure: "square" },
    };
    const slow = api.run(body);
    const fast = await api.run({ ...body, ns: 2 });
    expect(fast.ns).toBe(2);
    release!();
    await expect(slow).rejects.toBeInstanceOf(Superseded);
  });
});
