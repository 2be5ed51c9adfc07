using System;
using System.Net;
using System.Net.Http;
using System.Text;
using System.Text.Json.Nodes;
using System.Threading.Tasks;
using Xunit;

public class AccountTests : IClassFixture<ApiFixture>
{
    private readonly ApiFixture _fixture;

    public AccountTests(ApiFixture fixture)
    {
        _fixture = fixture;
    }

    [Fact]
    public async Task TC101_Login_Valid_Credentials_Returns_Token()
    {
        // Arrange
        var email = _fixture.GenerateUniqueEmail();
        await _fixture.CreateUserAsync(email, "Val1d!Pass");

        // Act
        var response = await _fixture.LoginAsync(email, "Val1d!Pass");

        // Assert
        Assert.Equal(HttpStatusCode.OK, response.StatusCode);
        var body = JsonNode.Parse(await response.Content.ReadAsStringAsync())!;
        Assert.False(string.IsNullOrEmpty(body["userId"]!.GetValue<string>()));
        Assert.False(string.IsNullOrEmpty(body["token"]!.GetValue<string>()));
        Assert.False(string.IsNullOrEmpty(body["refreshToken"]!.GetValue<string>()));
    }
}
