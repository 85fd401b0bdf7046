// The test service address, shared by the global setup (which spawns the
// service) and the tests (which call it). Both sides compute it the same
// way because they run in separate processes.
export const PORT = Number(process.env["PMR_UI_TEST_PORT"] ?? 8917);
export const BASE_URL = `http://127.0.0.1:${PORT}`;
