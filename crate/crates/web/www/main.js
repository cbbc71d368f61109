import init, { ladder, orbit, solve } from "./pkg/steiner_ladder_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function show(id, text, isError) {
  $(id).textContent = text;
  $(id).className = isError ? "out err" : "out";
}

function drawLadder() {
  try {
    const r = JSON.parse(ladder($("family").value, num("alpha"), num("lambda"), num("depth") | 0, $("word").value, $("side").value));
    $("ladder-fig").innerHTML = r.svg;
    show("ladder-out",
      `closed form ${r.closed_form.toFixed(12)}\nMaxwell     ${r.maxwell.toFixed(12)}\nedge sum    ${r.edge_sum.toFixed(12)}\n` +
      `class ${r.class}, ${r.blocks.length} block(s)\n` + r.blocks.map((b) => b.join(" ")).join("\n"));
  } catch (e) {
    $("ladder-fig").innerHTML = "";
    show("ladder-out", String(e), true);
  }
  drawOrbit();
}

function forward(r, t) {
  return t / r.lambda + (t < r.t_star ? r.q_plus : r.q_minus);
}

function cobweb(r) {
  const c = $("cobweb"), g = c.getContext("2d"), n = c.width;
  const X = (t) => 10 + t * (n - 20), Y = (t) => n - 10 - t * (n - 20);
  g.clearRect(0, 0, n, n);
  g.strokeStyle = "#bbb";
  g.strokeRect(X(0), Y(1), X(1) - X(0), Y(0) - Y(1));
  g.beginPath(); g.moveTo(X(0), Y(0)); g.lineTo(X(1), Y(1)); g.stroke();
  g.strokeStyle = "#1f4e9c";
  g.beginPath();
  for (const [a, b] of [[0, r.t_star], [r.t_star, 1]]) {
    const lo = Math.max(a, (0 - (a < r.t_star ? r.q_plus : r.q_minus)) * r.lambda);
    const hi = Math.min(b, (1 - (a < r.t_star ? r.q_plus : r.q_minus)) * r.lambda);
    if (lo < hi) { g.moveTo(X(lo), Y(forward(r, lo))); g.lineTo(X(hi), Y(forward(r, hi))); }
  }
  g.stroke();
  g.strokeStyle = "#c0392b";
  g.beginPath();
  const v = r.values;
  if (v.length) g.moveTo(X(v[0]), Y(0));
  for (let i = 0; i + 1 < v.length; i++) {
    g.lineTo(X(v[i]), Y(v[i + 1]));
    g.lineTo(X(v[i + 1]), Y(v[i + 1]));
  }
  g.stroke();
}

function drawOrbit() {
  const alpha = num("alpha");
  const beta = Math.max(-alpha, Math.min(alpha, num("beta")));
  $("beta-v").textContent = beta.toFixed(2);
  $("t0-v").textContent = num("t0").toFixed(3);
  try {
    const r = JSON.parse(orbit(alpha, num("lambda"), beta, num("t0"), num("steps") | 0));
    cobweb(r);
    $("orbit-fig").innerHTML = r.svg || "";
    const status = r.status.kind === "ok" ? "ok" : `${r.status.kind} at step ${r.status.step}`;
    show("orbit-out", `t* = ${r.t_star.toFixed(6)}, status ${status}\n` + r.values.map((t) => t.toFixed(9)).join("\n"));
  } catch (e) {
    $("orbit-fig").innerHTML = "";
    show("orbit-out", String(e), true);
  }
}

const clicks = [];

function drawBoard() {
  const c = $("board"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  let text = "";
  if (clicks.length >= 2) {
    try {
      const r = JSON.parse(solve(JSON.stringify(clicks.map(([x, y]) => [x, c.height - y]))));
      const P = (i) => [r.vertices[i][0], c.height - r.vertices[i][1]];
      g.strokeStyle = "#1f4e9c"; g.lineWidth = 2;
      g.beginPath();
      for (const [a, b] of r.edges) { g.moveTo(...P(a)); g.lineTo(...P(b)); }
      g.stroke();
      g.fillStyle = "#1f4e9c";
      r.vertices.forEach((v, i) => { if (v[2]) { g.beginPath(); g.arc(...P(i), 3, 0, 7); g.fill(); } });
      text = `length ${r.length.toFixed(3)}, spanning tree ${r.mst.toFixed(3)}, ratio ${(r.length / r.mst).toFixed(4)}, ${r.co_optima} optimal tree(s)`;
    } catch (e) {
      show("solve-out", String(e), true);
      return;
    }
  }
  g.fillStyle = "#c0392b";
  for (const [x, y] of clicks) { g.beginPath(); g.arc(x, y, 4, 0, 7); g.fill(); }
  show("solve-out", text);
}

await init();
for (const id of ["family", "alpha", "lambda", "depth", "word", "side"]) $(id).addEventListener("input", drawLadder);
for (const id of ["beta", "t0", "steps"]) $(id).addEventListener("input", drawOrbit);
$("board").addEventListener("click", (ev) => {
  if (clicks.length >= 8) return;
  const rect = ev.target.getBoundingClientRect();
  clicks.push([ev.clientX - rect.left, ev.clientY - rect.top]);
  drawBoard();
});
$("clear").addEventListener("click", () => { clicks.length = 0; drawBoard(); });
drawLadder();
drawBoard();
