import { createApp } from "./app.js";

const port = Number(process.env.PORT ?? 8470);
const app = createApp();
app.listen(port, () => {
  console.log(`model server listening on :${port}`);
});
